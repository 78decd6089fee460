//! Fast products `Aᵀb` and `Ab` for matrices given by a recurrence.
//!
//! Over an interval `[ℓ, r)` with midpoint `m` the transpose product carries
//!
//! * `H = S_[m:r]·H_L + S_[ℓ:m]·H_R + P_R·Q_L`,
//! * `P = S_[m:r]·P_L + P_R·T_[ℓ:m]`,
//!
//! where `S` are products of leading coefficients and `Q` is precomputed in the
//! tree. The forward product runs the adjoint of the same recursion on linear
//! functionals represented as coefficient sequences.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::krylov::extend_sequence;
use crate::poly::{correlate, Poly};
use crate::polymat::PolyMat;
use crate::poly::{from_spectrum, spectrum, spectrum_mul_add};
use crate::recurrence::{DyadicTree, RecurrenceSpec, Spectra, FOLD_LEVEL};

fn check_tree(spec: &RecurrenceSpec, tree: &DyadicTree) -> Result<()> {
    if tree.size() < spec.rows() || tree.width() != spec.width().max(1) {
        return Err(Error::Dimension("tree was built for a different spec".into()));
    }
    Ok(())
}

/// `bᵀ·H·C` reduced modulo the characteristic polynomial, one polynomial per error column.
pub fn bilinear_core(spec: &RecurrenceSpec, tree: &DyadicTree, b: &[Fp]) -> Result<Vec<Poly>> {
    Ok(bilinear_core_batched(spec, tree, &DenseMatrix::column(b))?.pop().unwrap())
}

/// Batched [`bilinear_core`]: one list of `r` polynomials per column of `bm`.
pub fn bilinear_core_batched(spec: &RecurrenceSpec, tree: &DyadicTree, bm: &DenseMatrix) -> Result<Vec<Vec<Poly>>> {
    check_tree(spec, tree)?;
    if bm.rows() != spec.rows() {
        return Err(Error::Dimension(format!("expected {} rows, got {}", spec.rows(), bm.rows())));
    }
    let levels = tree.levels().len() - 1;
    let (h, _) = accumulate(spec, tree, bm, levels, 0);
    let trunc = tree.truncation();
    let modulus = tree.modulus();
    let inv = tree.leading_inv();
    (0..bm.cols())
        .map(|p| {
            (0..spec.rank())
                .map(|k| match trunc {
                    Some(n) => Ok(h[(p, k)].mul_trunc(inv, n)),
                    None => h[(p, k)].mul(inv).rem(modulus),
                })
                .collect()
        })
        .collect()
}

/// Returns `(H, P)` for the node, shaped `P×r` and `P×t`.
fn accumulate(spec: &RecurrenceSpec, tree: &DyadicTree, bm: &DenseMatrix, level: usize, idx: usize) -> (PolyMat, PolyMat) {
    let (np, r, t) = (bm.cols(), spec.rank(), tree.width());
    let lo = idx << level;
    let hi = ((idx + 1) << level).min(spec.rows());
    if lo >= hi || (lo..hi).all(|i| bm.row(i).iter().all(|v| v.is_zero())) {
        return (PolyMat::zeros(np, r), PolyMat::zeros(np, t));
    }
    let trunc = tree.truncation();
    if level <= FOLD_LEVEL {
        return fold_block(spec, tree, bm, lo, hi, trunc);
    }
    let left = tree.node(level - 1, 2 * idx);
    let right = tree.node(level - 1, 2 * idx + 1);
    let (hl, pl) = accumulate(spec, tree, bm, level - 1, 2 * idx);
    let (hr, pr) = accumulate(spec, tree, bm, level - 1, 2 * idx + 1);
    let (pq, pt) = match &left.spectra {
        Some(sp) => spectral_products(&pr, sp, r, t, trunc),
        None => (pr.mul_trunc(&left.q, trunc), pr.mul_trunc(&left.trans, trunc)),
    };
    let h = hl.scale_poly(&right.suffix, trunc).add(&hr.scale_poly(&left.suffix, trunc)).add(&pq);
    let p = pl.scale_poly(&right.suffix, trunc).add(&pt);
    (h, p)
}

/// `P_R·Q_L` and `P_R·T_L` from cached transforms of the left child, transforming `P_R` once.
fn spectral_products(pr: &PolyMat, sp: &Spectra, r: usize, t: usize, trunc: Option<usize>) -> (PolyMat, PolyMat) {
    let np = pr.rows();
    let len = trunc.map_or(sp.size, |n| n.min(sp.size));
    let mut pq = PolyMat::zeros(np, r);
    let mut pt = PolyMat::zeros(np, t);
    for p in 0..np {
        let fr: Vec<Option<Vec<u32>>> =
            (0..t).map(|s| (!pr[(p, s)].is_zero()).then(|| spectrum(pr[(p, s)].coeffs(), sp.size))).collect();
        let combine = |table: &[Option<Vec<u32>>], cols: usize, j: usize| {
            let mut acc: Option<Vec<u32>> = None;
            for (s, f) in fr.iter().enumerate() {
                if let (Some(f), Some(g)) = (f, &table[s * cols + j]) {
                    spectrum_mul_add(acc.get_or_insert_with(|| vec![0; sp.size]), f, g);
                }
            }
            acc.map(|a| from_spectrum(a, len)).unwrap_or_default()
        };
        for k in 0..r {
            pq[(p, k)] = combine(&sp.q, r, k);
        }
        for s2 in 0..t {
            pt[(p, s2)] = combine(&sp.trans, t, s2);
        }
    }
    (pq, pt)
}

/// `(H, P)` over `[lo, hi)` by absorbing one leaf at a time from the right end.
fn fold_block(
    spec: &RecurrenceSpec,
    tree: &DyadicTree,
    bm: &DenseMatrix,
    lo: usize,
    hi: usize,
    trunc: Option<usize>,
) -> (PolyMat, PolyMat) {
    let (np, r, t) = (bm.cols(), spec.rank(), tree.width());
    let cap = trunc.unwrap_or(usize::MAX);
    let mut hm = PolyMat::zeros(np, r);
    let mut pm = PolyMat::zeros(np, t);
    for p in 0..np {
        let mut h: Vec<Vec<Fp>> = vec![Vec::new(); r];
        let mut pv: Vec<Vec<Fp>> = vec![Vec::new(); t];
        let mut tail = vec![Fp::ONE];
        for j in (lo..hi).rev() {
            let leaf = tree.node(0, j);
            let lead = leaf.suffix.coeffs();
            let bj = bm[(j, p)];
            for hk in h.iter_mut() {
                *hk = mul_capped(hk, lead, cap);
            }
            for (s, ps) in pv.iter().enumerate() {
                for (k, hk) in h.iter_mut().enumerate() {
                    mul_add_capped(hk, ps, leaf.q[(s, k)].coeffs(), cap);
                }
            }
            if !bj.is_zero() {
                for (k, hk) in h.iter_mut().enumerate() {
                    axpy(hk, bj * spec.c()[(j, k)], &tail);
                }
            }
            let mut next: Vec<Vec<Fp>> = vec![Vec::new(); t];
            for (s, ps) in pv.iter().enumerate() {
                for (s2, nx) in next.iter_mut().enumerate() {
                    mul_add_capped(nx, ps, leaf.trans[(s, s2)].coeffs(), cap);
                }
            }
            if !bj.is_zero() {
                axpy(&mut next[t - 1], bj, &tail);
            }
            pv = next;
            tail = mul_capped(&tail, lead, cap);
        }
        for (k, hk) in h.into_iter().enumerate() {
            hm[(p, k)] = Poly::from_coeffs(hk);
        }
        for (s, ps) in pv.into_iter().enumerate() {
            pm[(p, s)] = Poly::from_coeffs(ps);
        }
    }
    (hm, pm)
}

fn mul_capped(a: &[Fp], b: &[Fp], cap: usize) -> Vec<Fp> {
    let mut out = Vec::new();
    mul_add_capped(&mut out, a, b, cap);
    out
}

/// `dst += a·b`, dropping coefficients of degree `cap` and above.
fn mul_add_capped(dst: &mut Vec<Fp>, a: &[Fp], b: &[Fp], cap: usize) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    let len = (a.len() + b.len() - 1).min(cap);
    if dst.len() < len {
        dst.resize(len, Fp::ZERO);
    }
    for (i, &x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (d, &y) in dst[i..len].iter_mut().zip(b) {
            *d += x * y;
        }
    }
}

/// `dst += s·v`.
fn axpy(dst: &mut Vec<Fp>, s: Fp, v: &[Fp]) {
    if dst.len() < v.len() {
        dst.resize(v.len(), Fp::ZERO);
    }
    for (d, &x) in dst.iter_mut().zip(v) {
        *d += s * x;
    }
}

/// `Aᵀ·B` column by column, sharing the tree products across columns.
pub fn transpose_mult_batched(spec: &RecurrenceSpec, tree: &DyadicTree, bm: &DenseMatrix) -> Result<DenseMatrix> {
    let n = spec.cols();
    let f = bilinear_core_batched(spec, tree, bm)?;
    let mut out = DenseMatrix::zeros(n, bm.cols());
    for (p, fs) in f.iter().enumerate() {
        let mut col = vec![Fp::ZERO; n];
        for (k, fk) in fs.iter().enumerate() {
            if fk.is_zero() {
                continue;
            }
            let part = tree.krylov[k].apply(&fk.to_vec(n))?;
            col.iter_mut().zip(part).for_each(|(a, b)| *a += b);
        }
        out.set_col(p, &col);
    }
    Ok(out)
}

/// `Aᵀ·b`.
pub fn transpose_mult(spec: &RecurrenceSpec, tree: &DyadicTree, b: &[Fp]) -> Result<Vec<Fp>> {
    Ok(transpose_mult_batched(spec, tree, &DenseMatrix::column(b))?.col(0))
}

/// `A·x`, by the adjoint of the transpose recursion.
pub fn forward_mult(spec: &RecurrenceSpec, tree: &DyadicTree, x: &[Fp]) -> Result<Vec<Fp>> {
    check_tree(spec, tree)?;
    let n = spec.cols();
    if x.len() != n {
        return Err(Error::Dimension(format!("expected length {n}, got {}", x.len())));
    }
    let root = tree.root();
    let len = root.deg_h + 1;
    let u = tree.leading_inv();
    let mut phi_h = Vec::with_capacity(spec.rank());
    for k in 0..spec.rank() {
        let beta = tree.krylov[k].apply_transpose(x)?;
        let ext = match tree.truncation() {
            Some(_) => beta,
            None => extend_sequence(&beta, tree.modulus(), len + u.len()),
        };
        phi_h.push(correlate(&ext, u, len));
    }
    let mut out = vec![Fp::ZERO; spec.rows()];
    let levels = tree.levels().len() - 1;
    descend(spec, tree, levels, 0, &phi_h, None, &mut out);
    Ok(out)
}

fn descend(
    spec: &RecurrenceSpec,
    tree: &DyadicTree,
    level: usize,
    idx: usize,
    phi_h: &[Vec<Fp>],
    phi_p: Option<&[Vec<Fp>]>,
    out: &mut [Fp],
) {
    let lo = idx << level;
    if lo >= spec.rows() {
        return;
    }
    let t = tree.width();
    if level == 0 {
        let mut acc: Fp = phi_h
            .iter()
            .enumerate()
            .map(|(k, f)| f.first().copied().unwrap_or(Fp::ZERO) * spec.c()[(lo, k)])
            .sum();
        if let Some(pp) = phi_p {
            acc += pp[t - 1].first().copied().unwrap_or(Fp::ZERO);
        }
        out[lo] = acc;
        return;
    }
    let left = tree.node(level - 1, 2 * idx);
    let right = tree.node(level - 1, 2 * idx + 1);
    let lh: Vec<Vec<Fp>> = phi_h.iter().map(|f| correlate(f, &right.suffix, left.deg_h + 1)).collect();
    let lp: Option<Vec<Vec<Fp>>> =
        phi_p.map(|pp| pp.iter().map(|f| correlate(f, &right.suffix, left.deg_p + 1)).collect());
    descend(spec, tree, level - 1, 2 * idx, &lh, lp.as_deref(), out);
    if ((2 * idx + 1) << (level - 1)) >= spec.rows() {
        return;
    }
    let rlen = right.deg_h + 1;
    let plen = right.deg_p + 1;
    let rh: Vec<Vec<Fp>> = phi_h.iter().map(|f| correlate(f, &left.suffix, rlen)).collect();
    let rp: Vec<Vec<Fp>> = (0..t)
        .map(|s2| {
            let mut acc = vec![Fp::ZERO; plen];
            for (k, f) in phi_h.iter().enumerate() {
                add_into(&mut acc, &correlate(f, &left.q[(s2, k)], plen));
            }
            if let Some(pp) = phi_p {
                for (s, f) in pp.iter().enumerate() {
                    add_into(&mut acc, &correlate(f, &left.trans[(s2, s)], plen));
                }
            }
            acc
        })
        .collect();
    descend(spec, tree, level - 1, 2 * idx + 1, &rh, Some(&rp), out);
}

fn add_into(acc: &mut [Fp], v: &[Fp]) {
    for (a, &b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}
