//! Randomized sweeps comparing every fast path with the dense oracle or an exact identity.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use recwidth::displacement::{DisplacementOp, DisplacementOperator, DisplacementRep};
use recwidth::fixtures::{random_basic_spec, random_descriptor, random_spec, RKind, SpecShape};
use recwidth::krylov::KrylovOperator;
use recwidth::multiply::{forward_mult, transpose_mult, transpose_mult_batched};
use recwidth::oracle::dense_from_spec;
use recwidth::recovery::recover_recurrence;
use recwidth::rng::SplitMix64;
use recwidth::solvers::{displacement_inverse, triangular_solve};
use recwidth::{build_dyadic_tree, DenseMatrix, Fp, RDescriptor, RecurrenceSpec};

/// Largest size at which the generator inversion is exercised.
const INVERSE_MAX: usize = 256;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub sizes: Vec<usize>,
    pub widths: Vec<usize>,
    pub ranks: Vec<usize>,
    pub seeds: Vec<u64>,
    pub kinds: Vec<RKind>,
    pub jobs: usize,
    /// Builds fast-path trees from a spec whose middle row is replaced by its successor.
    pub inject_fault: bool,
}

/// One checked operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseOutcome {
    pub op: &'static str,
    pub kind: &'static str,
    pub n: usize,
    pub t: usize,
    pub r: usize,
    pub seed: u64,
    pub failure: Option<String>,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for CaseOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} N={} t={} seed={} kind={} r={}", self.op, self.n, self.t, self.seed, self.kind, self.r)?;
        if let Some(msg) = &self.failure {
            write!(f, ": {msg}")?;
        }
        Ok(())
    }
}

struct Case {
    n: usize,
    t: usize,
    seed: u64,
    out: Vec<CaseOutcome>,
}

impl Case {
    fn record(&mut self, op: &'static str, kind: &'static str, r: usize, check: impl FnOnce() -> Result<(), String>) {
        let failure = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(Ok(())) => None,
            Ok(Err(msg)) => Some(msg),
            Err(e) => Some(
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into()),
            ),
        };
        self.out.push(CaseOutcome { op, kind, n: self.n, t: self.t, r, seed: self.seed, failure });
    }
}

fn first_difference(got: &[Fp], want: &[Fp]) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("length {} but expected {}", got.len(), want.len()));
    }
    match got.iter().zip(want).position(|(a, b)| a != b) {
        None => Ok(()),
        Some(i) => Err(format!("entry {i} is {} but the oracle gives {}", got[i], want[i])),
    }
}

fn stream(seed: u64, salt: u64) -> SplitMix64 {
    SplitMix64::new(seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ salt)
}

fn salt(n: usize, t: usize, r: usize, kind: usize) -> u64 {
    (n as u64) << 32 | (t as u64) << 24 | (r as u64) << 16 | kind as u64
}

/// Copy of `spec` whose middle row carries the next row's coefficients, if such a row exists.
pub fn inject_off_by_one(spec: &RecurrenceSpec) -> Option<RecurrenceSpec> {
    let rows = spec.rows();
    let k = rows / 2;
    if k < spec.width() || k + 1 >= rows {
        return None;
    }
    let mut g: Vec<Vec<_>> = (0..rows).map(|i| spec.g_row(i).to_vec()).collect();
    g[k] = g[k + 1].clone();
    RecurrenceSpec::new(spec.width(), spec.degree(), g, spec.c().clone(), spec.d().clone(), spec.r_desc().clone()).ok()
}

fn check_products(case: &mut Case, kind: RKind, r: usize, inject: bool) {
    let (n, t) = (case.n, case.t);
    let mut rng = stream(case.seed, salt(n, t, r, kind as usize));
    let degree = (1, (case.seed % 2) as usize);
    let spec = random_spec(&mut rng, kind, SpecShape { rows: n, n, t, r, degree });
    let fast = if inject { inject_off_by_one(&spec).unwrap_or_else(|| spec.clone()) } else { spec.clone() };
    let (tree, a) = match (build_dyadic_tree(&fast), dense_from_spec(&spec)) {
        (Ok(tree), Ok(a)) => (tree, a),
        (Err(e), _) | (_, Err(e)) => {
            case.record("transpose_mult", kind.name(), r, || Err(format!("setup failed: {e}")));
            return;
        }
    };
    let b = rng.fp_vec(n);
    let x = rng.fp_vec(n);
    let bm = DenseMatrix::from_fn(n, 3, |_, _| rng.fp());
    case.record("transpose_mult", kind.name(), r, || {
        first_difference(&transpose_mult(&fast, &tree, &b).map_err(|e| e.to_string())?, &a.vecmat(&b))
    });
    case.record("forward_mult", kind.name(), r, || {
        first_difference(&forward_mult(&fast, &tree, &x).map_err(|e| e.to_string())?, &a.matvec(&x))
    });
    case.record("transpose_mult_batched", kind.name(), r, || {
        let got = transpose_mult_batched(&fast, &tree, &bm).map_err(|e| e.to_string())?;
        let want = a.transpose().mul(&bm);
        (0..3).try_for_each(|j| first_difference(&got.col(j), &want.col(j)).map_err(|m| format!("column {j}: {m}")))
    });
}

fn check_krylov(case: &mut Case, kind: RKind) {
    let n = case.n;
    let mut rng = stream(case.seed, salt(n, case.t, 0, 100 + kind as usize));
    let r = random_descriptor(&mut rng, kind, n, case.t.clamp(1, 2));
    let y = rng.fp_vec(n);
    let x = rng.fp_vec(n);
    let z = rng.fp_vec(n);
    case.record("krylov", kind.name(), 0, || {
        let op = KrylovOperator::new(&r, &y).map_err(|e| e.to_string())?;
        let mut col = y.clone();
        let mut kx = vec![Fp::ZERO; n];
        let mut ktz = Vec::with_capacity(n);
        for &xj in &x {
            kx.iter_mut().zip(&col).for_each(|(acc, &c)| *acc += xj * c);
            ktz.push(col.iter().zip(&z).map(|(&a, &b)| a * b).sum());
            col = r.matvec(&col);
        }
        first_difference(&op.apply(&x).map_err(|e| e.to_string())?, &kx)?;
        first_difference(&op.apply_transpose(&z).map_err(|e| e.to_string())?, &ktz)
    });
}

/// Residual identity on random vectors: `(L·A - A·R)v = C·(D·v)` or `(A - L·A·R)v = C·(D·v)`.
fn residual_probe(rep: &DisplacementRep, op: &DisplacementOperator, v: &[Fp]) -> Result<(), String> {
    let e = |m: recwidth::Result<Vec<Fp>>| m.map_err(|e| e.to_string());
    let av = e(op.mul(v))?;
    let arv = e(op.mul(&rep.r.matvec(v)))?;
    let lhs: Vec<Fp> = match rep.op {
        DisplacementOp::Sylvester => rep.l.matvec(&av).iter().zip(&arv).map(|(&a, &b)| a - b).collect(),
        DisplacementOp::Stein => av.iter().zip(rep.l.matvec(&arv)).map(|(&a, b)| a - b).collect(),
    };
    first_difference(&lhs, &rep.c.matvec(&rep.d.matvec(v)))
}

fn check_displacement(case: &mut Case, kind: RKind) {
    let n = case.n;
    for op in [DisplacementOp::Sylvester, DisplacementOp::Stein] {
        let mut rng = stream(case.seed, salt(n, case.t, op as usize, 200 + kind as usize));
        let l = RDescriptor::Diagonal(rng.distinct_fp_vec(n));
        let r = random_descriptor(&mut rng, kind, n, 1);
        let c = DenseMatrix::from_fn(n, case.t, |_, _| rng.fp());
        let d = DenseMatrix::from_fn(case.t, n, |_, _| rng.fp());
        let probes = [rng.fp_vec(n), rng.fp_vec(n)];
        case.record("disp_mult", kind.name(), case.t, || {
            let rep = DisplacementRep::new(op, l.clone(), r.clone(), c.clone(), d.clone()).map_err(|e| e.to_string())?;
            if rep.check_unique().is_err() {
                return Ok(());
            }
            let fast = DisplacementOperator::new(&rep).map_err(|e| e.to_string())?;
            probes.iter().try_for_each(|v| residual_probe(&rep, &fast, v))
        });
        if op == DisplacementOp::Sylvester && n <= INVERSE_MAX {
            case.record("displacement_inverse", kind.name(), case.t, || {
                let rep = DisplacementRep::new(op, l, r, c, d).map_err(|e| e.to_string())?;
                if rep.check_unique().is_err() {
                    return Ok(());
                }
                let inv = displacement_inverse(&rep).map_err(|e| e.to_string())?;
                let a = DisplacementOperator::new(&rep).map_err(|e| e.to_string())?;
                let ai = DisplacementOperator::new(&inv).map_err(|e| e.to_string())?;
                for v in &probes {
                    residual_probe(&inv, &ai, v)?;
                    let back = a.mul(&ai.mul(v).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                    first_difference(&back, v).map_err(|m| format!("A·A⁻¹v ≠ v: {m}"))?;
                }
                Ok(())
            });
        }
    }
}

fn check_solver_and_recovery(case: &mut Case) {
    let (n, t) = (case.n, case.t);
    let mut rng = stream(case.seed, salt(n, t, 0, 300));
    let spec = random_basic_spec(&mut rng, n, t);
    let y = rng.fp_vec(n);
    case.record("triangular_solve", "shift", 0, || {
        let tree = build_dyadic_tree(&spec).map_err(|e| e.to_string())?;
        let x = triangular_solve(&spec, &y, false).map_err(|e| e.to_string())?;
        first_difference(&transpose_mult(&spec, &tree, &x).map_err(|e| e.to_string())?, &y)?;
        let z = triangular_solve(&spec, &y, true).map_err(|e| e.to_string())?;
        first_difference(&forward_mult(&spec, &tree, &z).map_err(|e| e.to_string())?, &y)
    });
    if n > t * (t + 3) / 2 {
        case.record("recover_recurrence", "shift", 0, || {
            let a = dense_from_spec(&spec).map_err(|e| e.to_string())?;
            let fit = recover_recurrence(&a, t).map_err(|e| e.to_string())?;
            let spec = fit.spec.ok_or_else(|| format!("rows {:?} admit no relation", fit.failed_rows))?;
            let b = dense_from_spec(&spec).map_err(|e| e.to_string())?;
            (0..n).try_for_each(|i| first_difference(b.row(i), a.row(i)).map_err(|m| format!("row {i}: {m}")))
        });
    }
}

fn run_case(cfg: &VerifyConfig, n: usize, t: usize, seed: u64) -> Vec<CaseOutcome> {
    let mut case = Case { n, t, seed, out: Vec::new() };
    for &kind in &cfg.kinds {
        for &r in &cfg.ranks {
            check_products(&mut case, kind, r, cfg.inject_fault);
        }
        check_krylov(&mut case, kind);
        check_displacement(&mut case, kind);
    }
    check_solver_and_recovery(&mut case);
    case.out
}

/// Runs the sweep over `sizes × widths × seeds`, up to `jobs` cases at a time, in a fixed output order.
pub fn run_verify(cfg: &VerifyConfig) -> Vec<CaseOutcome> {
    let tasks: Vec<(usize, usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| cfg.widths.iter().flat_map(move |&t| cfg.seeds.iter().map(move |&s| (n, t, s))))
        .collect();
    let results: Mutex<Vec<Option<Vec<CaseOutcome>>>> = Mutex::new(vec![None; tasks.len()]);
    let next = AtomicUsize::new(0);
    let workers = cfg.jobs.clamp(1, tasks.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(n, t, seed)) = tasks.get(i) else { break };
                let out = run_case(cfg, n, t, seed);
                results.lock().unwrap()[i] = Some(out);
            });
        }
    });
    results.into_inner().unwrap().into_iter().flatten().flatten().collect()
}

/// Oracle checks of the three products on a user-supplied spec.
pub fn verify_spec(spec: &RecurrenceSpec, seed: u64) -> Vec<CaseOutcome> {
    let (n, rows) = (spec.cols(), spec.rows());
    let mut case = Case { n, t: spec.width(), seed, out: Vec::new() };
    let r = spec.rank();
    let setup = build_dyadic_tree(spec).and_then(|tree| Ok((tree, dense_from_spec(spec)?)));
    let (tree, a) = match setup {
        Ok(v) => v,
        Err(e) => {
            case.record("transpose_mult", "file", r, || Err(format!("setup failed: {e}")));
            return case.out;
        }
    };
    let mut rng = SplitMix64::new(seed);
    let b = rng.fp_vec(rows);
    let x = rng.fp_vec(n);
    let bm = DenseMatrix::from_fn(rows, 2, |_, _| rng.fp());
    case.record("transpose_mult", "file", r, || {
        first_difference(&transpose_mult(spec, &tree, &b).map_err(|e| e.to_string())?, &a.vecmat(&b))
    });
    case.record("forward_mult", "file", r, || {
        first_difference(&forward_mult(spec, &tree, &x).map_err(|e| e.to_string())?, &a.matvec(&x))
    });
    case.record("transpose_mult_batched", "file", r, || {
        let got = transpose_mult_batched(spec, &tree, &bm).map_err(|e| e.to_string())?;
        let want = a.transpose().mul(&bm);
        (0..2).try_for_each(|j| first_difference(&got.col(j), &want.col(j)))
    });
    case.out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(inject_fault: bool) -> VerifyConfig {
        VerifyConfig {
            sizes: vec![8, 16],
            widths: vec![1, 2],
            ranks: vec![1, 2],
            seeds: vec![0, 1],
            kinds: RKind::ALL.to_vec(),
            jobs: 3,
            inject_fault,
        }
    }

    #[test]
    fn clean_sweep_passes_deterministically() {
        let first = run_verify(&config(false));
        assert!(first.iter().all(CaseOutcome::passed), "{:?}", first.iter().find(|c| !c.passed()));
        assert_eq!(first, run_verify(&VerifyConfig { jobs: 1, ..config(false) }));
        let ops: std::collections::HashSet<_> = first.iter().map(|c| c.op).collect();
        assert_eq!(ops.len(), 8);
    }

    #[test]
    fn injected_fault_is_caught_by_transpose_mult() {
        let out = run_verify(&config(true));
        let failed: Vec<_> = out.iter().filter(|c| !c.passed()).collect();
        assert!(!failed.is_empty());
        assert_eq!(failed[0].op, "transpose_mult");
        assert!(failed.iter().all(|c| c.op.ends_with("_mult") || c.op == "transpose_mult_batched"));
    }
}
