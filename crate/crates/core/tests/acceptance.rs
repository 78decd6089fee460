//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero on failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use recwidth::apps::{bernoulli_numbers, bivariate_eval, stirling_apply, orthogonal_transform, Direction, OrthoFamily};
use recwidth::displacement::{disp_mult, DisplacementOp, DisplacementOperator, DisplacementRep};
use recwidth::fixtures::{random_basic_spec, random_descriptor, random_quasi, random_spec, RKind, SpecShape};
use recwidth::krylov::{krylov_dense, KrylovOperator};
use recwidth::multiply::{forward_mult, transpose_mult, transpose_mult_batched};
use recwidth::oracle::{dense_char_poly, dense_from_displacement, dense_from_spec, displacement_residual};
use recwidth::quasi::resolvent;
use recwidth::recovery::recover_recurrence;
use recwidth::recurrence::{build_dyadic_tree, structure_entry, RDescriptor};
use recwidth::rng::SplitMix64;
use recwidth::solvers::{displacement_inverse, triangular_solve};
use recwidth::{DenseMatrix, Fp, Poly};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn dot(a: &[Fp], b: &[Fp]) -> Fp {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn unit(n: usize, j: usize) -> Vec<Fp> {
    let mut v = vec![Fp::ZERO; n];
    v[j] = Fp::ONE;
    v
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let secs = start.elapsed().as_secs_f64();
    match &result {
        Ok(detail) => println!("PASS  {id:>2} {name}: {detail} [{secs:.2}s]"),
        Err(detail) => println!("FAIL  {id:>2} {name}: {detail} [{secs:.2}s]"),
    }
    result.is_ok()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for kind in RKind::ALL {
        for n in [8usize, 16, 32, 64] {
            for t in 1..=3usize {
                for r in 1..=2usize {
                    for seed in 0..10u64 {
                        let mut rng = SplitMix64::new(seed ^ (n as u64) << 8 ^ (t as u64) << 16 ^ (r as u64) << 20);
                        let degree = if seed % 2 == 0 { (1, 0) } else { (1, 1) };
                        let spec = random_spec(&mut rng, kind, SpecShape { rows: n, n, t, r, degree });
                        let tree = build_dyadic_tree(&spec).map_err(|e| e.to_string())?;
                        let a = dense_from_spec(&spec).map_err(|e| e.to_string())?;
                        let tag = format!("{} N={n} t={t} r={r} seed={seed}", kind.name());
                        let b = rng.fp_vec(n);
                        let x = rng.fp_vec(n);
                        ensure!(transpose_mult(&spec, &tree, &b).unwrap() == a.vecmat(&b), "transpose_mult mismatch at {tag}");
                        ensure!(forward_mult(&spec, &tree, &x).unwrap() == a.matvec(&x), "forward_mult mismatch at {tag}");
                        let bm = DenseMatrix::from_fn(n, 3, |_, _| rng.fp());
                        let batched = transpose_mult_batched(&spec, &tree, &bm).unwrap();
                        ensure!(batched == a.transpose().mul(&bm), "transpose_mult_batched mismatch at {tag}");
                        cases += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "{cases} cases took {:.1}s, over 30s", elapsed.as_secs_f64());
    Ok(format!("{cases} specs, 3 products each, exact"))
}

fn structure_inverse() -> Outcome {
    let mut checked = 0;
    for kind in RKind::ALL {
        for (n, t, seed) in [(8usize, 2usize, 1u64), (16, 3, 2), (12, 1, 3)] {
            let mut rng = SplitMix64::new(seed * 31 + kind as u64);
            let spec = random_spec(&mut rng, kind, SpecShape { rows: n, n, t, r: 1, degree: (1, 0) });
            let tree = build_dyadic_tree(&spec).unwrap();
            let m = tree.modulus().clone();
            let h: Vec<Vec<Poly>> =
                (0..n).map(|i| (0..n).map(|j| structure_entry(&spec, &tree, i, j).unwrap()).collect()).collect();
            let g = |k: usize, j: usize| -> Poly {
                if k == j {
                    spec.g(k, 0)
                } else if k > j && k - j < spec.g_row(k).len() {
                    -spec.g(k, k - j)
                } else {
                    Poly::zero()
                }
            };
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Poly::zero();
                    for k in j..=i {
                        acc += &h[i][k].mul(&g(k, j));
                    }
                    let acc = acc.rem(&m).unwrap();
                    let expect = if i == j { Poly::one() } else { Poly::zero() };
                    ensure!(acc == expect, "({i},{j}) entry wrong for {} N={n} t={t}", kind.name());
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} specs, all entries of H·G reduce to the identity"))
}

fn degree_bounds() -> Outcome {
    let mut entries = 0usize;
    for kind in [RKind::Companion, RKind::Shift, RKind::Diagonal] {
        for t in 1..=4usize {
            for (d, dbar) in [(1usize, 0usize), (1, 1), (2, 1)] {
                for n in [16usize, 256] {
                    let mut rng = SplitMix64::new((t * 100 + d * 10 + dbar) as u64 + n as u64);
                    let spec = random_spec(&mut rng, kind, SpecShape { rows: n, n, t, r: 1, degree: (d, dbar) });
                    let tree = build_dyadic_tree(&spec).unwrap();
                    for (level, nodes) in tree.levels().iter().enumerate() {
                        let len = 1usize << level;
                        for (b, node) in nodes.iter().enumerate() {
                            for i in 0..t {
                                for j in 0..t {
                                    let Some(deg) = node.trans[(i, j)].degree() else { continue };
                                    let bound = (d + dbar) * (len + i).saturating_sub(j);
                                    entries += 1;
                                    ensure!(
                                        deg <= bound,
                                        "{} t={t} deg=({d},{dbar}) node [{}, {}) entry ({i},{j}) has degree {deg} > {bound}",
                                        kind.name(),
                                        b * len,
                                        (b + 1) * len
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{entries} nonzero entries within bounds"))
}

fn transposition_consistency() -> Outcome {
    let n = 1 << 12;
    let mut pairs = 0;
    for (kind, seed) in [(RKind::Shift, 4u64), (RKind::Diagonal, 5), (RKind::Companion, 6)] {
        let mut rng = SplitMix64::new(seed);
        let spec = random_spec(&mut rng, kind, SpecShape { rows: n, n, t: 2, r: 2, degree: (1, 1) });
        let tree = build_dyadic_tree(&spec).unwrap();
        let count = if kind == RKind::Shift { 10 } else { 5 };
        for _ in 0..count {
            let b = rng.fp_vec(n);
            let c = rng.fp_vec(n);
            let ab = forward_mult(&spec, &tree, &b).unwrap();
            let atc = transpose_mult(&spec, &tree, &c).unwrap();
            ensure!(dot(&c, &ab) == dot(&b, &atc), "pairing mismatch for {}", kind.name());
            pairs += 1;
        }
    }
    Ok(format!("{pairs} random pairs at N={n}"))
}

fn naive_mulmod(y: &[Fp], x: &[Fp], m: &Poly) -> Vec<Fp> {
    let n = m.degree().unwrap();
    let mut prod = vec![Fp::ZERO; y.len() + x.len()];
    for (i, &a) in y.iter().enumerate() {
        for (j, &b) in x.iter().enumerate() {
            prod[i + j] += a * b;
        }
    }
    let mc = m.coeffs();
    for k in (n..prod.len()).rev() {
        let q = prod[k];
        if q.is_zero() {
            continue;
        }
        for (s, &c) in mc.iter().enumerate() {
            prod[k - n + s] -= q * c;
        }
    }
    prod.truncate(n);
    prod
}

fn krylov() -> Outcome {
    let mut rng = SplitMix64::new(55);
    for kind in RKind::ALL {
        for n in [1usize, 7, 32, 64] {
            for t in [1usize, 2] {
                let r = random_descriptor(&mut rng, kind, n, t);
                let dr = r.to_dense();
                let y = rng.fp_vec(n);
                let op = KrylovOperator::new(&r, &y).unwrap();
                let mut col = y.clone();
                for j in 0..n {
                    ensure!(op.apply(&unit(n, j)).unwrap() == col, "{} N={n}: column {j} is not R^j y", kind.name());
                    col = dr.matvec(&col);
                }
                let x = rng.fp_vec(n);
                ensure!(op.apply_transpose(&x).unwrap() == krylov_dense(&r, &y).vecmat(&x), "{} N={n}: transpose", kind.name());
            }
        }
    }
    for n in [5usize, 128, 1024] {
        let mut c = rng.fp_vec(n);
        c.push(Fp::ONE);
        let m = Poly::from_coeffs(c);
        let r = RDescriptor::companion(m.clone()).unwrap();
        let y = rng.fp_vec(n);
        let x = rng.fp_vec(n);
        let fast = KrylovOperator::new(&r, &y).unwrap().apply(&x).unwrap();
        ensure!(fast == naive_mulmod(&y, &x, &m), "companion N={n}: K x differs from y·x mod M");
    }
    Ok("columns for all kinds up to N=64; companion identity up to N=1024".into())
}

fn random_rep(rng: &mut SplitMix64, op: DisplacementOp, lk: RKind, rk: RKind, n: usize, rank: usize) -> Option<DisplacementRep> {
    for _ in 0..4 {
        let l = random_descriptor(rng, lk, n, 1);
        let r = random_descriptor(rng, rk, n, 1);
        let c = DenseMatrix::from_fn(n, rank, |_, _| rng.fp());
        let d = DenseMatrix::from_fn(rank, n, |_, _| rng.fp());
        if let Ok(rep) = DisplacementRep::new(op, l, r, c, d) {
            if rep.check_unique().is_ok() {
                return Some(rep);
            }
        }
    }
    None
}

fn displacement() -> Outcome {
    let mut rng = SplitMix64::new(66);
    let (mut checked, mut skipped) = (0, 0);
    for op in [DisplacementOp::Sylvester, DisplacementOp::Stein] {
        for (li, lk) in RKind::ALL.into_iter().enumerate() {
            for (ri, rk) in RKind::ALL.into_iter().enumerate() {
                let sizes: &[usize] = if (li + ri) % 3 == 0 { &[9, 64] } else { &[9] };
                for &n in sizes {
                    let Some(rep) = random_rep(&mut rng, op, lk, rk, n, 2) else {
                        skipped += 1;
                        continue;
                    };
                    let tag = format!("{op:?} L={} R={} N={n}", lk.name(), rk.name());
                    let fast = DisplacementOperator::new(&rep).map_err(|e| format!("{tag}: {e}"))?;
                    let a = fast.mul_matrix(&DenseMatrix::identity(n)).unwrap();
                    ensure!(displacement_residual(&rep, &a) == rep.c.mul(&rep.d), "{tag}: residual nonzero");
                    let oracle = dense_from_displacement(&rep).map_err(|e| format!("{tag}: {e}"))?;
                    let b = rng.fp_vec(n);
                    ensure!(disp_mult(&rep, &b, false).unwrap() == oracle.matvec(&b), "{tag}: A·b differs");
                    ensure!(disp_mult(&rep, &b, true).unwrap() == oracle.vecmat(&b), "{tag}: Aᵀ·b differs");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} reps checked, {skipped} operator pairs without a unique solution"))
}

fn resolvent_check() -> Outcome {
    let mut rng = SplitMix64::new(77);
    for t in [1usize, 2] {
        for n in [16usize, 64, 128] {
            let q = random_quasi(&mut rng, n, t);
            let dq = q.to_dense();
            let b = DenseMatrix::from_fn(n, 2, |_, _| rng.fp());
            let c = DenseMatrix::from_fn(n, 2, |_, _| rng.fp());
            let res = resolvent(&b, &q, &c);
            let cp = dense_char_poly(&dq);
            ensure!(res.den.scale(cp.lead()) == cp.scale(res.den.lead()), "t={t} N={n}: denominator not proportional to char poly");
            for _ in 0..20 {
                let xi = rng.fp();
                let w = DenseMatrix::identity(n).scale(xi).sub(&dq).solve_matrix(&c).map_err(|e| e.to_string())?;
                let val = b.transpose().mul(&w);
                let den = res.den.eval(xi);
                for i in 0..2 {
                    for j in 0..2 {
                        ensure!(res.num[(i, j)].eval(xi) == den * val[(i, j)], "t={t} N={n}: entry ({i},{j}) at {xi:?}");
                    }
                }
            }
        }
    }
    Ok("quasiseparable orders 1 and 2 up to N=128, 20 points each".into())
}

fn solver() -> Outcome {
    let n = 1 << 10;
    for seed in 0..10u64 {
        let mut rng = SplitMix64::new(seed);
        let t = 1 + (seed as usize % 3);
        let spec = random_basic_spec(&mut rng, n, t);
        let tree = build_dyadic_tree(&spec).unwrap();
        let y = rng.fp_vec(n);
        let x = triangular_solve(&spec, &y, false).map_err(|e| e.to_string())?;
        ensure!(transpose_mult(&spec, &tree, &x).unwrap() == y, "transposed solve wrong at seed {seed}");
        let z = triangular_solve(&spec, &y, true).map_err(|e| e.to_string())?;
        ensure!(forward_mult(&spec, &tree, &z).unwrap() == y, "forward solve wrong at seed {seed}");
    }
    Ok(format!("10 seeds at N={n}, both orientations"))
}

fn inverse() -> Outcome {
    let mut rng = SplitMix64::new(88);
    let pairs = [
        (RKind::BandLower, RKind::Quasi),
        (RKind::Diagonal, RKind::Diagonal),
        (RKind::Shift, RKind::Diagonal),
        (RKind::BandLower, RKind::Companion),
        (RKind::Quasi, RKind::BandUpper),
        (RKind::Companion, RKind::Diagonal),
    ];
    let mut checked = 0;
    for (lk, rk) in pairs {
        for n in [8usize, 16, 40, 64] {
            let Some(rep) = random_rep(&mut rng, DisplacementOp::Sylvester, lk, rk, n, 2) else {
                return Err(format!("no uniquely solvable rep for L={} R={}", lk.name(), rk.name()));
            };
            let tag = format!("L={} R={} N={n}", lk.name(), rk.name());
            let a = dense_from_displacement(&rep).unwrap();
            let inv = displacement_inverse(&rep).map_err(|e| format!("{tag}: {e}"))?;
            let ai = a.inverse().map_err(|e| format!("{tag}: {e}"))?;
            ensure!(dense_from_displacement(&inv).unwrap() == ai, "{tag}: generators describe the wrong matrix");
            let disp = displacement_residual(&inv, &ai);
            ensure!(disp == inv.c.mul(&inv.d), "{tag}: R·A⁻¹ - A⁻¹·L ≠ G'H'ᵀ");
            ensure!(a.mul(&ai) == DenseMatrix::identity(n), "{tag}: A·A⁻¹ ≠ I");
            ensure!(inv.rank() == disp.rank(), "{tag}: width {} but displacement rank {}", inv.rank(), disp.rank());
            checked += 1;
        }
    }
    Ok(format!("{checked} inverses exact with minimal generator width"))
}

fn recovery() -> Outcome {
    let mut checked = 0;
    for t in 1..=3usize {
        for n in [16usize, 50, 128] {
            let mut rng = SplitMix64::new((t * 1000 + n) as u64);
            let a = dense_from_spec(&random_basic_spec(&mut rng, n, t)).unwrap();
            let fit = recover_recurrence(&a, t).map_err(|e| e.to_string())?;
            let spec = fit.spec.ok_or_else(|| format!("t={t} N={n}: rows {:?} failed", fit.failed_rows))?;
            ensure!(dense_from_spec(&spec).unwrap() == a, "t={t} N={n}: regenerated matrix differs");
            checked += 1;
        }
    }
    Ok(format!("{checked} round trips"))
}

fn applications() -> Outcome {
    let count = 128;
    let bern = bernoulli_numbers(count).map_err(|e| e.to_string())?;
    let mut binom = vec![vec![Fp::ZERO; count + 2]; count + 2];
    for i in 0..count + 2 {
        binom[i][0] = Fp::ONE;
        for k in 1..=i {
            binom[i][k] = binom[i - 1][k - 1] + binom[i - 1][k];
        }
    }
    let mut oracle: Vec<Fp> = Vec::with_capacity(count);
    for m in 0..count {
        let s: Fp = (0..m).map(|k| binom[m + 1][k] * oracle[k]).sum();
        oracle.push(if m == 0 { Fp::ONE } else { -s * Fp::new(m as u64 + 1).inv() });
    }
    ensure!(bern == oracle, "Bernoulli numbers differ");

    let n = 256;
    let mut table = vec![vec![Fp::ZERO; n]; n];
    table[0][0] = Fp::ONE;
    for i in 1..n {
        for k in 1..=i {
            table[i][k] = Fp::new(k as u64) * table[i - 1][k] + table[i - 1][k - 1];
        }
    }
    let mut rng = SplitMix64::new(99);
    for i in [0usize, 1, 17, 128, 255] {
        ensure!(stirling_apply(n, &unit(n, i), true).unwrap() == table[i], "Stirling row {i} differs");
    }
    let w = DenseMatrix::from_rows(&table, n);
    let x = rng.fp_vec(n);
    ensure!(stirling_apply(n, &x, false).unwrap() == w.matvec(&x), "Stirling product differs");

    let points = rng.distinct_fp_vec(n);
    let family = OrthoFamily::chebyshev(points.clone());
    let coeffs = rng.fp_vec(n);
    let fast = orthogonal_transform(&family, &coeffs, Direction::Projection).unwrap();
    let (mut prev, mut cur) = (Poly::one(), Poly::x());
    let mut series = Poly::constant(coeffs[0]);
    for &c in coeffs.iter().skip(1) {
        series += &cur.scale(c);
        let next = &Poly::from_i64s(&[0, 2]).mul(&cur) - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    let horner = |z: Fp| series.coeffs().iter().rev().fold(Fp::ZERO, |acc, &c| acc * z + c);
    ensure!(fast == points.iter().map(|&z| horner(z)).collect::<Vec<_>>(), "Chebyshev transform differs from Horner");

    for d in 1..=8usize {
        let pts: Vec<(Fp, Fp)> = (0..d * d).map(|_| (rng.nonzero_fp(), rng.nonzero_fp())).collect();
        let f = rng.fp_vec(d * d);
        let direct: Vec<Fp> = pts
            .iter()
            .map(|&(x, y)| {
                let mut s = Fp::ZERO;
                for b in 0..d {
                    for a in 0..d {
                        s += f[a + d * b] * x.pow(a as u64) * y.pow(b as u64);
                    }
                }
                s
            })
            .collect();
        ensure!(bivariate_eval(&pts, d, &f).unwrap() == direct, "bivariate evaluation differs at d={d}");
    }
    Ok("Bernoulli 128, Stirling 256, Chebyshev 256 points, bivariate d≤8".into())
}

fn median_time(mut f: impl FnMut(), reps: usize) -> Duration {
    let mut times: Vec<Duration> = (0..reps)
        .map(|_| {
            let s = Instant::now();
            f();
            s.elapsed()
        })
        .collect();
    times.sort();
    times[reps / 2]
}

fn query_time(n: usize) -> Duration {
    let mut rng = SplitMix64::new(n as u64);
    let spec = random_spec(&mut rng, RKind::Shift, SpecShape { rows: n, n, t: 1, r: 1, degree: (1, 0) });
    let tree = build_dyadic_tree(&spec).unwrap();
    let b = rng.fp_vec(n);
    transpose_mult(&spec, &tree, &b).unwrap();
    median_time(|| drop(std::hint::black_box(transpose_mult(&spec, &tree, &b).unwrap())), 5)
}

fn performance() -> Outcome {
    let n = 1 << 13;
    let mut rng = SplitMix64::new(1);
    let dense = DenseMatrix::from_fn(n, n, |_, _| rng.fp());
    let v = rng.fp_vec(n);
    let dense_t = median_time(|| drop(std::hint::black_box(dense.matvec(&v))), 3);
    drop(dense);
    let times: Vec<Duration> = (11..=14).map(|k| query_time(1 << k)).collect();
    let fast_t = times[2];
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1].as_secs_f64() / w[0].as_secs_f64()).collect();
    let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let detail = format!(
        "query {:.2}ms vs dense {:.2}ms at N=8192 (ratio {:.3}); doubling ratios {:?} avg {avg:.2}",
        fast_t.as_secs_f64() * 1e3,
        dense_t.as_secs_f64() * 1e3,
        fast_t.as_secs_f64() / dense_t.as_secs_f64(),
        ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
    ensure!(fast_t * 3 <= dense_t, "query slower than a third of dense matvec: {detail}");
    ensure!(avg <= 3.2, "doubling ratio too high: {detail}");
    Ok(detail)
}

fn main() {
    let start = Instant::now();
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("oracle equivalence", oracle_equivalence),
        ("structure inverse", structure_inverse),
        ("degree bounds", degree_bounds),
        ("transposition consistency", transposition_consistency),
        ("krylov", krylov),
        ("displacement", displacement),
        ("resolvent", resolvent_check),
        ("triangular solver", solver),
        ("displacement inverse", inverse),
        ("recovery round trip", recovery),
        ("applications", applications),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        if !run(i + 1, name, f) {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", 12 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
