//! Timing sweeps written as CSV.

use std::fmt::Write as _;
use std::hint::black_box;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;

use recwidth::fixtures::{random_basic_spec, random_descriptor, random_spec, RKind, SpecShape};
use recwidth::krylov::KrylovOperator;
use recwidth::multiply::{forward_mult, transpose_mult};
use recwidth::rng::SplitMix64;
use recwidth::solvers::TriangularSolver;
use recwidth::{build_dyadic_tree, DenseMatrix};

use crate::error::CliError;

pub const CSV_HEADER: &str = "op,n,t,r,seed,pre_ns,query_ns,dense_ns";

/// Dense baselines above this many rows time a slab and scale by `N / rows`.
const DENSE_SLAB: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchOp {
    TransposeMult,
    ForwardMult,
    TriangularSolve,
    Krylov,
}

impl BenchOp {
    pub fn name(self) -> &'static str {
        match self {
            BenchOp::TransposeMult => "transpose-mult",
            BenchOp::ForwardMult => "forward-mult",
            BenchOp::TriangularSolve => "triangular-solve",
            BenchOp::Krylov => "krylov",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub op: BenchOp,
    pub kind: RKind,
    pub sizes: Vec<usize>,
    pub t: usize,
    pub r: usize,
    pub seeds: Vec<u64>,
    pub reps: usize,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRecord {
    pub op: &'static str,
    pub n: usize,
    pub t: usize,
    pub r: usize,
    pub seed: u64,
    pub pre_ns: u128,
    pub query_ns: u128,
    pub dense_ns: u128,
}

impl BenchRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.op, self.n, self.t, self.r, self.seed, self.pre_ns, self.query_ns, self.dense_ns
        )
    }
}

fn nanos_since(start: Instant) -> u128 {
    start.elapsed().as_nanos().max(1)
}

fn median_ns(reps: usize, mut f: impl FnMut()) -> u128 {
    let mut v: Vec<u128> = (0..reps.max(1))
        .map(|_| {
            let s = Instant::now();
            f();
            nanos_since(s)
        })
        .collect();
    v.sort_unstable();
    v[v.len() / 2]
}

/// Time of a dense `N×N` matrix-vector product with random entries.
pub fn dense_baseline_ns(n: usize, seed: u64, reps: usize) -> u128 {
    let rows = n.min(DENSE_SLAB);
    let mut rng = SplitMix64::new(seed ^ 0xD3A5);
    let m = DenseMatrix::from_fn(rows, n, |_, _| rng.fp());
    let v = rng.fp_vec(n);
    let t = median_ns(reps, || drop(black_box(m.matvec(black_box(&v)))));
    (t * n as u128 / rows as u128).max(1)
}

fn run_one(cfg: &BenchConfig, n: usize, seed: u64) -> Result<BenchRecord, CliError> {
    let mut rng = SplitMix64::new(seed.wrapping_add((n as u64) << 20));
    let shape = SpecShape { rows: n, n, t: cfg.t, r: cfg.r, degree: (1, 0) };
    let v = |rng: &mut SplitMix64| rng.fp_vec(n);
    let (pre_ns, query_ns) = match cfg.op {
        BenchOp::TransposeMult | BenchOp::ForwardMult => {
            let spec = random_spec(&mut rng, cfg.kind, shape);
            let s = Instant::now();
            let tree = build_dyadic_tree(&spec)?;
            let pre = nanos_since(s);
            let b = v(&mut rng);
            let forward = cfg.op == BenchOp::ForwardMult;
            let run = || if forward { forward_mult(&spec, &tree, &b) } else { transpose_mult(&spec, &tree, &b) };
            run()?;
            (pre, median_ns(cfg.reps, || drop(black_box(run()))))
        }
        BenchOp::TriangularSolve => {
            let spec = random_basic_spec(&mut rng, n, cfg.t);
            let s = Instant::now();
            let solver = TriangularSolver::new(&spec)?;
            let pre = nanos_since(s);
            let y = v(&mut rng);
            solver.solve_transpose(&y)?;
            (pre, median_ns(cfg.reps, || drop(black_box(solver.solve_transpose(&y)))))
        }
        BenchOp::Krylov => {
            let r = random_descriptor(&mut rng, cfg.kind, n, cfg.t.clamp(1, 2));
            let y = v(&mut rng);
            let s = Instant::now();
            let op = KrylovOperator::new(&r, &y)?;
            let pre = nanos_since(s);
            let x = v(&mut rng);
            op.apply(&x)?;
            (pre, median_ns(cfg.reps, || drop(black_box(op.apply(&x)))))
        }
    };
    Ok(BenchRecord {
        op: cfg.op.name(),
        n,
        t: cfg.t,
        r: cfg.r,
        seed,
        pre_ns,
        query_ns,
        dense_ns: dense_baseline_ns(n, seed, cfg.reps.min(3)),
    })
}

/// Runs every `(size, seed)` pair single-threaded.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>, CliError> {
    if let Some(&bad) = cfg.sizes.iter().find(|n| !n.is_power_of_two()) {
        return Err(CliError::Usage(format!("benchmark sizes must be powers of two, got {bad}")));
    }
    let mut out = Vec::new();
    for &n in &cfg.sizes {
        for &seed in &cfg.seeds {
            out.push(run_one(cfg, n, seed)?);
        }
    }
    Ok(out)
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(s, "{}", r.csv_line());
    }
    s
}

pub fn write_csv(path: &Path, records: &[BenchRecord]) -> Result<(), CliError> {
    std::fs::write(path, to_csv(records))?;
    Ok(())
}

/// Mean ratio of query times across consecutive size doublings, averaged over seeds.
pub fn doubling_ratio(records: &[BenchRecord]) -> Option<f64> {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mean = |n: usize| -> f64 {
        let v: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| r.query_ns as f64).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let ratios: Vec<f64> =
        sizes.windows(2).filter(|w| w[1] == 2 * w[0]).map(|w| mean(w[1]) / mean(w[0])).collect();
    (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_per_size_and_seed() {
        let cfg = BenchConfig {
            op: BenchOp::TransposeMult,
            kind: RKind::Shift,
            sizes: vec![16, 32],
            t: 2,
            r: 1,
            seeds: vec![0, 1, 2],
            reps: 1,
        };
        let recs = run_bench(&cfg).unwrap();
        assert_eq!(recs.len(), 6);
        assert!(recs.iter().all(|r| r.pre_ns > 0 && r.query_ns > 0 && r.dense_ns > 0));
        let csv = to_csv(&recs);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert!(csv.lines().nth(1).unwrap().starts_with("transpose-mult,16,2,1,0,"));
        assert!(doubling_ratio(&recs).is_some());
    }

    #[test]
    fn rejects_non_powers_of_two() {
        let cfg = BenchConfig { op: BenchOp::Krylov, kind: RKind::Shift, sizes: vec![12], t: 1, r: 1, seeds: vec![0], reps: 1 };
        assert!(matches!(run_bench(&cfg), Err(CliError::Usage(_))));
    }
}
