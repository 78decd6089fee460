//! Krylov matrices `K(R, y) = [y, Ry, R²y, …]`: products with `K` and `Kᵀ`.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::evaltree::EvalTree;
use crate::field::Fp;
use crate::multiply::{forward_mult, transpose_mult};
use crate::poly::{correlate, Poly};
use crate::quasi::{resolvent, QuasiSep};
use crate::recurrence::{build_dyadic_tree, BandMatrix, DyadicTree, RDescriptor, RecurrenceSpec};

/// Monic characteristic polynomial `det(XI - R)`.
pub fn char_poly(r: &RDescriptor) -> Result<Poly> {
    Ok(match r {
        RDescriptor::Companion(m) => m.clone(),
        RDescriptor::Shift(n) => Poly::monomial(Fp::ONE, *n),
        RDescriptor::Diagonal(z) => Poly::from_roots(z),
        RDescriptor::Band(b) => Poly::from_roots(b.diagonal()),
        RDescriptor::Quasi(q) => {
            let empty = DenseMatrix::zeros(q.size(), 0);
            resolvent(&empty, q, &empty).den
        }
    })
}

/// Width-Δ recurrence over `X^N` whose rows are the rows of `K(M, y)` for lower-triangular `M`.
///
/// Row `i` obeys `(1 - M[i,i]X)·F_i = Σ_j M[i,i-j]X·F_{i-j} + y_i`.
pub fn banded_krylov_spec(m: &BandMatrix, y: &[Fp]) -> Result<RecurrenceSpec> {
    if !m.is_lower() {
        return Err(Error::Unsupported("banded Krylov spec needs a lower band".into()));
    }
    let n = m.n();
    if y.len() != n {
        return Err(Error::Dimension("Krylov generator length".into()));
    }
    let delta = m.delta();
    let g = (0..n)
        .map(|i| {
            let mut row = vec![Poly::from_coeffs(vec![Fp::ONE, -m.get(i, i)])];
            for j in 1..=delta.min(i) {
                row.push(Poly::monomial(m.get(i, i - j), 1));
            }
            row
        })
        .collect();
    let c = DenseMatrix::column(y);
    let mut d = DenseMatrix::zeros(1, n);
    if n > 0 {
        d[(0, 0)] = Fp::ONE;
    }
    RecurrenceSpec::new(delta, (0, 1), g, c, d, RDescriptor::Shift(n))
}

/// Linear-recurrence continuation of `s[0..N)` under the monic `modulus`, to `len` terms.
pub(crate) fn extend_sequence(s: &[Fp], modulus: &Poly, len: usize) -> Vec<Fp> {
    let n = modulus.degree().unwrap_or(0);
    if len <= s.len() || modulus.coeffs()[..n].iter().all(|v| v.is_zero()) {
        let mut out = s.to_vec();
        out.resize(len, Fp::ZERO);
        return out;
    }
    let rev = modulus.reverse(n);
    let inv = rev.inv_series(len).expect("monic modulus");
    extend_with(s, &rev, &inv, len)
}

pub(crate) fn extend_with(s: &[Fp], rev: &Poly, rev_inv: &Poly, len: usize) -> Vec<Fp> {
    let n = s.len();
    let head = Poly::from_slice(s).mul_trunc(rev, n);
    head.mul_trunc(rev_inv, len).to_vec(len)
}

#[derive(Clone, Debug)]
enum Cache {
    Modular { modulus: Poly, y: Poly, shift: bool },
    Diagonal { points: Vec<Fp>, tree: EvalTree },
    Banded { spec: Box<RecurrenceSpec>, tree: Box<DyadicTree>, reversed: bool },
    Quasi(QuasiSep),
}

/// A Krylov matrix with its per-kind precomputation.
#[derive(Clone, Debug)]
pub struct KrylovOperator {
    n: usize,
    y: Vec<Fp>,
    cache: Cache,
}

impl KrylovOperator {
    pub fn new(r: &RDescriptor, y: &[Fp]) -> Result<Self> {
        let n = r.size();
        if y.len() != n {
            return Err(Error::Dimension(format!("Krylov generator has length {}, expected {n}", y.len())));
        }
        let cache = match r {
            RDescriptor::Companion(_) | RDescriptor::Shift(_) => Cache::Modular {
                modulus: r.modulus_poly().unwrap(),
                y: Poly::from_slice(y),
                shift: matches!(r, RDescriptor::Shift(_)),
            },
            RDescriptor::Diagonal(z) => Cache::Diagonal { points: z.clone(), tree: EvalTree::new(z) },
            RDescriptor::Band(b) => {
                let (band, gen, reversed) = if b.is_lower() {
                    (b.clone(), y.to_vec(), false)
                } else {
                    (b.reversed(), y.iter().rev().copied().collect(), true)
                };
                let spec = banded_krylov_spec(&band, &gen)?;
                let tree = build_dyadic_tree(&spec)?;
                Cache::Banded { spec: Box::new(spec), tree: Box::new(tree), reversed }
            }
            RDescriptor::Quasi(q) => Cache::Quasi(q.clone()),
        };
        Ok(KrylovOperator { n, y: y.to_vec(), cache })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `K x = Σ_j x_j R^j y`.
    pub fn apply(&self, x: &[Fp]) -> Result<Vec<Fp>> {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        Ok(match &self.cache {
            Cache::Modular { modulus, y, shift } => {
                let px = Poly::from_slice(x);
                let prod = if *shift { y.mul_trunc(&px, n) } else { y.mul(&px).rem(modulus)? };
                prod.to_vec(n)
            }
            Cache::Diagonal { tree, .. } => {
                let vals = tree.multipoint_eval(&Poly::from_slice(x));
                vals.iter().zip(&self.y).map(|(&v, &w)| v * w).collect()
            }
            Cache::Banded { spec, tree, reversed } => {
                let out = forward_mult(spec, tree, x)?;
                if *reversed {
                    out.into_iter().rev().collect()
                } else {
                    out
                }
            }
            Cache::Quasi(q) => {
                let mut w = vec![Fp::ZERO; n];
                for &xi in x.iter().rev() {
                    w = q.matvec(&w);
                    for (a, &b) in w.iter_mut().zip(&self.y) {
                        *a += xi * b;
                    }
                }
                w
            }
        })
    }

    /// `(Kᵀ x)_j = xᵀ R^j y`.
    pub fn apply_transpose(&self, x: &[Fp]) -> Result<Vec<Fp>> {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        Ok(match &self.cache {
            Cache::Modular { modulus, y, shift } => {
                let len = n + y.len();
                let seq = if *shift { x.to_vec() } else { extend_sequence(x, modulus, len) };
                correlate(&seq, y, n)
            }
            Cache::Diagonal { points, tree } => {
                debug_assert_eq!(points.len(), n);
                tree.transposed_eval(x, &self.y, n)
            }
            Cache::Banded { spec, tree, reversed } => {
                if *reversed {
                    let xr: Vec<Fp> = x.iter().rev().copied().collect();
                    transpose_mult(spec, tree, &xr)?
                } else {
                    transpose_mult(spec, tree, x)?
                }
            }
            Cache::Quasi(q) => {
                let res = resolvent(&DenseMatrix::column(x), q, &DenseMatrix::column(&self.y));
                let num = res.num[(0, 0)].reverse(n.saturating_sub(1));
                let den = res.den.reverse(n);
                num.mul_trunc(&den.inv_series(n)?, n).to_vec(n)
            }
        })
    }
}

/// `K(R, y)·x`.
pub fn krylov_apply(r: &RDescriptor, y: &[Fp], x: &[Fp]) -> Result<Vec<Fp>> {
    KrylovOperator::new(r, y)?.apply(x)
}

/// `K(R, y)ᵀ·x`.
pub fn krylov_apply_transpose(r: &RDescriptor, y: &[Fp], x: &[Fp]) -> Result<Vec<Fp>> {
    KrylovOperator::new(r, y)?.apply_transpose(x)
}

/// Dense `K(R, y)` by repeated products, for checks.
pub fn krylov_dense(r: &RDescriptor, y: &[Fp]) -> DenseMatrix {
    let n = r.size();
    let dm = r.to_dense();
    let mut k = DenseMatrix::zeros(n, n);
    let mut col = y.to_vec();
    for j in 0..n {
        k.set_col(j, &col);
        col = dm.matvec(&col);
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{random_descriptor, RKind};
    use crate::rng::SplitMix64;

    fn fps(v: &[i64]) -> Vec<Fp> {
        v.iter().map(|&x| Fp::from_i64(x)).collect()
    }

    #[test]
    fn characteristic_polynomials() {
        assert_eq!(char_poly(&RDescriptor::Diagonal(fps(&[1, 2]))).unwrap(), Poly::from_i64s(&[2, -3, 1]));
        assert_eq!(char_poly(&RDescriptor::Shift(3)).unwrap(), Poly::monomial(Fp::ONE, 3));
    }

    #[test]
    fn small_examples() {
        let k = krylov_apply(&RDescriptor::Shift(3), &fps(&[1, 1, 1]), &fps(&[1, 2, 3])).unwrap();
        assert_eq!(k, fps(&[1, 3, 6]));
        let k = krylov_apply(&RDescriptor::Diagonal(fps(&[2, 3])), &fps(&[1, 1]), &fps(&[1, 1])).unwrap();
        assert_eq!(k, fps(&[3, 4]));
    }

    #[test]
    fn banded_spec_examples() {
        let zero = BandMatrix::new(3, 0, true, |_, _| Fp::ZERO);
        let y = fps(&[4, 5, 6]);
        let op = KrylovOperator::new(&RDescriptor::Band(zero), &y).unwrap();
        assert_eq!(op.apply(&fps(&[1, 7, 9])).unwrap(), fps(&[4, 5, 6]));
        let shift = BandMatrix::new(4, 1, true, |i, j| if i == j { Fp::ZERO } else { Fp::ONE });
        let e0 = fps(&[1, 0, 0, 0]);
        let x = fps(&[3, 1, 4, 1]);
        assert_eq!(krylov_apply(&RDescriptor::Band(shift), &e0, &x).unwrap(), x);
        let m = BandMatrix::new(2, 1, true, |_, _| Fp::ONE);
        let k = krylov_dense(&RDescriptor::Band(m.clone()), &fps(&[1, 0]));
        assert_eq!(k, DenseMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]));
        let spec = banded_krylov_spec(&m, &fps(&[1, 0])).unwrap();
        assert_eq!(crate::oracle::dense_from_spec(&spec).unwrap(), k);
    }

    #[test]
    fn columns_and_adjointness_all_kinds() {
        let mut rng = SplitMix64::new(21);
        for kind in RKind::ALL {
            for n in [1usize, 5, 16, 33] {
                let r = random_descriptor(&mut rng, kind, n, 2);
                let y = rng.fp_vec(n);
                let op = KrylovOperator::new(&r, &y).unwrap();
                let k = krylov_dense(&r, &y);
                let x = rng.fp_vec(n);
                assert_eq!(op.apply(&x).unwrap(), k.matvec(&x), "{kind:?} n={n}");
                assert_eq!(op.apply_transpose(&x).unwrap(), k.vecmat(&x), "{kind:?} n={n} transpose");
            }
        }
    }

    #[test]
    fn cayley_hamilton() {
        let mut rng = SplitMix64::new(4);
        for kind in RKind::ALL {
            let r = random_descriptor(&mut rng, kind, 12, 2);
            let c = char_poly(&r).unwrap();
            let dm = r.to_dense();
            let v = rng.fp_vec(12);
            let mut acc = vec![Fp::ZERO; 12];
            for &coef in c.coeffs().iter().rev() {
                acc = dm.matvec(&acc);
                for (a, &b) in acc.iter_mut().zip(&v) {
                    *a += coef * b;
                }
            }
            assert!(acc.iter().all(|x| x.is_zero()), "{kind:?}");
        }
    }
}
