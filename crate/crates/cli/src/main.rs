use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use recwidth::fixtures::{random_spec, RKind, SpecShape};
use recwidth::rng::SplitMix64;
use recwidth_cli::bench::{doubling_ratio, run_bench, to_csv, write_csv, BenchConfig, BenchOp};
use recwidth_cli::demo::{run_demo, DemoName};
use recwidth_cli::error::CliError;
use recwidth_cli::spec_io::SpecFile;
use recwidth_cli::verify::{run_verify, verify_spec, CaseOutcome, VerifyConfig};
use recwidth_cli::{parse_kinds, parse_list, parse_seeds};

#[derive(Parser)]
#[command(name = "recwidth", version, about = "Fast products, solves and recovery for matrices defined by short polynomial recurrences")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare every fast path against dense oracles on random instances.
    Verify {
        #[arg(long, default_value = "8,16,32")]
        sizes: String,
        #[arg(long = "t", default_value = "1,2")]
        widths: String,
        #[arg(long = "r", default_value = "1,2")]
        ranks: String,
        #[arg(long, default_value = "0..4")]
        seeds: String,
        /// Comma list of operator kinds, or `all`.
        #[arg(long, default_value = "all")]
        kinds: String,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Check a single spec read from JSON instead of random ones.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Only print failures and the summary.
        #[arg(long)]
        quiet: bool,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Time one operation over a size sweep and write CSV.
    Bench {
        #[arg(long, value_enum)]
        op: BenchOp,
        #[arg(long)]
        sizes: String,
        #[arg(long = "t", default_value_t = 2)]
        t: usize,
        #[arg(long = "r", default_value_t = 1)]
        r: usize,
        #[arg(long, default_value = "shift")]
        kind: String,
        #[arg(long, default_value = "0")]
        seeds: String,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a worked example and check it against a direct computation.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long = "r", default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a random spec as JSON.
    Gen {
        #[arg(long, default_value = "shift")]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long = "t", default_value_t = 2)]
        t: usize,
        #[arg(long = "r", default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn single_kind(s: &str) -> Result<RKind, CliError> {
    match parse_kinds(s)?.as_slice() {
        [k] => Ok(*k),
        _ => Err(CliError::Usage(format!("expected one operator kind, got {s:?}"))),
    }
}

fn report(outcomes: &[CaseOutcome], quiet: bool) -> Result<bool, CliError> {
    let mut out = std::io::stdout().lock();
    for o in outcomes.iter().filter(|o| !quiet || !o.passed()) {
        writeln!(out, "{o}")?;
    }
    let failed: Vec<&CaseOutcome> = outcomes.iter().filter(|o| !o.passed()).collect();
    writeln!(out, "{} checks, {} failed", outcomes.len(), failed.len())?;
    if let Some(first) = failed.first() {
        writeln!(out, "first failure: op={} N={} t={} seed={}", first.op, first.n, first.t, first.seed)?;
    }
    Ok(failed.is_empty())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Command::Verify { sizes, widths, ranks, seeds, kinds, jobs, spec, quiet, inject_fault } => {
            let seeds = parse_seeds(&seeds)?;
            if let Some(path) = spec {
                let spec = SpecFile::from_json(&std::fs::read_to_string(path)?)?.to_spec()?;
                let outcomes: Vec<CaseOutcome> = seeds.iter().flat_map(|&s| verify_spec(&spec, s)).collect();
                return report(&outcomes, quiet);
            }
            let jobs = if jobs == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { jobs };
            let cfg = VerifyConfig {
                sizes: parse_list(&sizes, "size")?,
                widths: parse_list(&widths, "width")?,
                ranks: parse_list(&ranks, "rank")?,
                seeds,
                kinds: parse_kinds(&kinds)?,
                jobs,
                inject_fault,
            };
            if cfg.sizes.contains(&0) {
                return Err(CliError::Usage("sizes must be positive".into()));
            }
            report(&run_verify(&cfg), quiet)
        }
        Command::Bench { op, sizes, t, r, kind, seeds, reps, csv } => {
            let cfg = BenchConfig {
                op,
                kind: single_kind(&kind)?,
                sizes: parse_list(&sizes, "size")?,
                t,
                r,
                seeds: parse_seeds(&seeds)?,
                reps,
            };
            let records = run_bench(&cfg)?;
            match csv {
                Some(path) => {
                    write_csv(&path, &records)?;
                    eprintln!("wrote {} rows to {}", records.len(), path.display());
                }
                None => print!("{}", to_csv(&records)),
            }
            if let Some(ratio) = doubling_ratio(&records) {
                eprintln!("mean query-time ratio per size doubling: {ratio:.2}");
            }
            Ok(true)
        }
        Command::Demo { name, n, r, seed } => {
            let rep = run_demo(name, n, r, seed)?;
            print!("{}", rep.text);
            Ok(rep.ok)
        }
        Command::Gen { kind, n, rows, t, r, degree, seed, out } => {
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let mut rng = SplitMix64::new(seed);
            let shape = SpecShape { rows: rows.unwrap_or(n), n, t, r, degree: (degree, 0) };
            let json = SpecFile::from_spec(&random_spec(&mut rng, single_kind(&kind)?, shape)).to_json()?;
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
