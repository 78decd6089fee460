//! Small end-to-end demonstrations, each compared against a direct computation.

use std::fmt::Write as _;

use clap::ValueEnum;

use recwidth::apps::{bernoulli_numbers, bivariate_eval, orthogonal_transform, stirling_apply, Direction, OrthoFamily};
use recwidth::displacement::{DisplacementOp, DisplacementOperator, DisplacementRep};
use recwidth::oracle::displacement_residual;
use recwidth::rng::SplitMix64;
use recwidth::solvers::displacement_inverse;
use recwidth::{DenseMatrix, Fp, Poly, RDescriptor};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Chebyshev,
    Bernoulli,
    Stirling,
    Bivariate,
    Cauchy,
}

/// Printed text and whether every comparison matched.
#[derive(Clone, Debug)]
pub struct DemoReport {
    pub text: String,
    pub ok: bool,
}

fn mismatches(a: &[Fp], b: &[Fp]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len())
}

fn preview(v: &[Fp], k: usize) -> String {
    let shown: Vec<String> = v.iter().take(k).map(|x| x.to_string()).collect();
    let more = if v.len() > k { ", …" } else { "" };
    format!("[{}{more}]", shown.join(", "))
}

pub fn run_demo(name: DemoName, n: usize, r: usize, seed: u64) -> Result<DemoReport, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut text = String::new();
    let ok = match name {
        DemoName::Chebyshev => {
            let points = rng.distinct_fp_vec(n);
            let coeffs = rng.fp_vec(n);
            let fast = orthogonal_transform(&OrthoFamily::chebyshev(points.clone()), &coeffs, Direction::Projection)?;
            let (mut prev, mut cur) = (Poly::one(), Poly::x());
            let mut series = Poly::constant(coeffs[0]);
            for &c in &coeffs[1..] {
                series += &cur.scale(c);
                let next = &Poly::from_i64s(&[0, 2]).mul(&cur) - &prev;
                prev = std::mem::replace(&mut cur, next);
            }
            let direct: Vec<Fp> = points.iter().map(|&z| series.eval(z)).collect();
            let bad = mismatches(&fast, &direct);
            let _ = writeln!(text, "Chebyshev series with {n} random coefficients at {n} random points");
            let _ = writeln!(text, "values: {}", preview(&fast, 6));
            let _ = writeln!(text, "mismatch count vs Horner: {bad}");
            bad == 0
        }
        DemoName::Bernoulli => {
            let fast = bernoulli_numbers(n)?;
            let mut oracle: Vec<Fp> = Vec::with_capacity(n);
            let mut binom = vec![Fp::ONE];
            for m in 0..n {
                binom = (0..=m + 1)
                    .map(|k| if k == 0 || k == m + 1 { Fp::ONE } else { binom[k - 1] + binom[k] })
                    .collect();
                let s: Fp = (0..m).map(|k| binom[k] * oracle[k]).sum();
                oracle.push(if m == 0 { Fp::ONE } else { -s * Fp::new(m as u64 + 1).inv() });
            }
            for (i, b) in fast.iter().enumerate() {
                let _ = writeln!(text, "B_{i} = {b}");
            }
            let ok = fast == oracle;
            let _ = writeln!(text, "oracle match: {ok}");
            ok
        }
        DemoName::Stirling => {
            let x = rng.fp_vec(n);
            let fast = stirling_apply(n, &x, false)?;
            let mut row = vec![Fp::ZERO; n];
            row[0] = Fp::ONE;
            let mut direct = vec![row.iter().zip(&x).map(|(&a, &b)| a * b).sum::<Fp>()];
            for _ in 1..n {
                let mut next = vec![Fp::ZERO; n];
                for k in 1..n {
                    next[k] = Fp::new(k as u64) * row[k] + row[k - 1];
                }
                row = next;
                direct.push(row.iter().zip(&x).map(|(&a, &b)| a * b).sum());
            }
            let bad = mismatches(&fast, &direct);
            let last = stirling_apply(n, &{
                let mut e = vec![Fp::ZERO; n];
                e[n - 1] = Fp::ONE;
                e
            }, true)?;
            let _ = writeln!(text, "Stirling numbers of the second kind, row {}: {}", n - 1, preview(&last, 8));
            let _ = writeln!(text, "W·x against the table recurrence: {bad} mismatches");
            bad == 0
        }
        DemoName::Bivariate => {
            let d = (n as f64).sqrt().round() as usize;
            if d * d != n {
                return Err(CliError::Usage(format!("bivariate demo needs --n to be a perfect square, got {n}")));
            }
            let pts: Vec<(Fp, Fp)> = (0..n).map(|_| (rng.nonzero_fp(), rng.nonzero_fp())).collect();
            let f = rng.fp_vec(n);
            let fast = bivariate_eval(&pts, d, &f)?;
            let direct: Vec<Fp> = pts
                .iter()
                .map(|&(x, y)| {
                    (0..n).map(|i| f[i] * x.pow((i % d) as u64) * y.pow((i / d) as u64)).sum()
                })
                .collect();
            let bad = mismatches(&fast, &direct);
            let _ = writeln!(text, "bivariate polynomial with degree < {d} in each variable at {n} points");
            let _ = writeln!(text, "values: {}", preview(&fast, 6));
            let _ = writeln!(text, "mismatches vs direct evaluation: {bad}");
            bad == 0
        }
        DemoName::Cauchy => {
            let s = rng.distinct_fp_vec(2 * n);
            let l = RDescriptor::Diagonal(s[..n].to_vec());
            let rr = RDescriptor::Diagonal(s[n..].to_vec());
            let c = DenseMatrix::from_fn(n, r, |_, _| rng.fp());
            let dm = DenseMatrix::from_fn(r, n, |_, _| rng.fp());
            let rep = DisplacementRep::new(DisplacementOp::Sylvester, l, rr, c, dm)?;
            let a = DisplacementOperator::new(&rep)?.mul_matrix(&DenseMatrix::identity(n))?;
            let residual = displacement_residual(&rep, &a).sub(&rep.c.mul(&rep.d));
            let nonzero = (0..n).map(|i| residual.row(i).iter().filter(|v| !v.is_zero()).count()).sum::<usize>();
            let inv = displacement_inverse(&rep)?;
            let ai = DisplacementOperator::new(&inv)?.mul_matrix(&DenseMatrix::identity(n))?;
            let identity = a.mul(&ai) == DenseMatrix::identity(n);
            let _ = writeln!(text, "Cauchy-like matrix of size {n} with displacement rank {r}");
            let _ = writeln!(text, "displacement residual nonzeros: {nonzero}");
            let _ = writeln!(text, "inverse generator width: {}", inv.rank());
            let _ = writeln!(text, "inverse check A·A⁻¹ = I: {}", if identity { "ok" } else { "FAILED" });
            nonzero == 0 && identity
        }
    };
    let _ = writeln!(text, "verdict: {}", if ok { "PASS" } else { "FAIL" });
    Ok(DemoReport { text, ok })
}
