//! Dense brute-force references. Slow on purpose and independent of the fast paths.

use crate::dense::DenseMatrix;
use crate::displacement::{DisplacementOp, DisplacementRep};
use crate::error::{Error, Result};
use crate::evaltree::interpolate;
use crate::field::Fp;
use crate::poly::Poly;
use crate::recurrence::RecurrenceSpec;

/// Dense matrix of a spec, by running the recurrence row by row.
pub fn dense_from_spec(spec: &RecurrenceSpec) -> Result<DenseMatrix> {
    let n = spec.cols();
    let rows = spec.rows();
    let mut out = DenseMatrix::zeros(rows, n);
    match spec.r_desc().modulus_poly() {
        Some(m) => {
            let errors: Vec<Poly> = (0..spec.rank()).map(|k| Poly::from_slice(spec.d().row(k))).collect();
            let mut prev: Vec<Poly> = Vec::with_capacity(rows);
            for i in 0..rows {
                let mut rhs = Poly::zero();
                for (k, e) in errors.iter().enumerate() {
                    rhs += &e.scale(spec.c()[(i, k)]);
                }
                for j in 1..spec.g_row(i).len() {
                    rhs += &spec.g(i, j).mul(&prev[i - j]);
                }
                let inv = spec.g(i, 0).inv_mod(&m).map_err(|_| Error::SharedRoots)?;
                let row = rhs.rem(&m)?.mul(&inv).rem(&m)?;
                out.row_mut(i).copy_from_slice(&row.to_vec(n));
                prev.push(row);
            }
        }
        None => {
            let r = spec.r_desc().to_dense();
            for i in 0..rows {
                let mut rhs = vec![Fp::ZERO; n];
                for k in 0..spec.rank() {
                    let ck = spec.c()[(i, k)];
                    for (v, &dk) in rhs.iter_mut().zip(spec.d().row(k)) {
                        *v += ck * dk;
                    }
                }
                for j in 1..spec.g_row(i).len() {
                    let term = poly_apply(&r, &spec.g(i, j), out.row(i - j));
                    rhs.iter_mut().zip(term).for_each(|(a, b)| *a += b);
                }
                let lead = poly_at_matrix(&r, &spec.g(i, 0));
                let row = lead.solve(&rhs).map_err(|_| Error::SharedRoots)?;
                out.row_mut(i).copy_from_slice(&row);
            }
        }
    }
    Ok(out)
}

/// `p(R)·v` by Horner.
fn poly_apply(r: &DenseMatrix, p: &Poly, v: &[Fp]) -> Vec<Fp> {
    let mut acc = vec![Fp::ZERO; v.len()];
    for &c in p.coeffs().iter().rev() {
        acc = r.matvec(&acc);
        acc.iter_mut().zip(v).for_each(|(a, &b)| *a += c * b);
    }
    acc
}

/// Dense `p(R)`.
pub fn poly_at_matrix(r: &DenseMatrix, p: &Poly) -> DenseMatrix {
    let n = r.rows();
    let mut acc = DenseMatrix::zeros(n, n);
    for &c in p.coeffs().iter().rev() {
        acc = acc.mul(r).add(&DenseMatrix::identity(n).scale(c));
    }
    acc
}

/// `det(XI - M)` by evaluation at `n + 1` points and interpolation.
pub fn dense_char_poly(m: &DenseMatrix) -> Poly {
    let n = m.rows();
    let pts: Vec<Fp> = (0..=n as u64).map(Fp::new).collect();
    let vals: Vec<Fp> = pts.iter().map(|&z| DenseMatrix::identity(n).scale(z).sub(m).det()).collect();
    interpolate(&pts, &vals).expect("distinct points")
}

/// The unique `A` with `L·A - A·R = C·D` (Sylvester) or `A - L·A·R = C·D` (Stein).
///
/// Uses `p(L) = 0` for the characteristic polynomial `p` of `L` to reduce to one dense solve,
/// then checks the defining equation.
pub fn dense_from_displacement(rep: &DisplacementRep) -> Result<DenseMatrix> {
    let l = rep.l.to_dense();
    let r = rep.r.to_dense();
    let e = rep.c.mul(&rep.d);
    let n = l.rows();
    let p = dense_char_poly(&l);
    let coeff = |k: usize| p.coeff(k);
    let (lhs, rhs) = match rep.op {
        DisplacementOp::Sylvester => {
            let mut y = DenseMatrix::zeros(n, n);
            let mut er = e.clone();
            let mut z = DenseMatrix::zeros(n, n);
            for k in 1..=n {
                y = l.mul(&y).add(&er);
                er = er.mul(&r);
                z = z.add(&y.scale(coeff(k)));
            }
            (poly_at_matrix(&r, &p), z.scale(-Fp::ONE))
        }
        DisplacementOp::Stein => {
            let mut s = DenseMatrix::zeros(n, n);
            let mut w = e.clone();
            let mut acc = DenseMatrix::zeros(n, n);
            let mut rev = DenseMatrix::zeros(n, n);
            for m in 0..=n {
                acc = acc.mul(&r).add(&s.scale(coeff(m)));
                rev = rev.mul(&r).add(&DenseMatrix::identity(n).scale(coeff(m)));
                s = s.add(&w);
                w = l.mul(&w).mul(&r);
            }
            (rev, acc)
        }
    };
    let a = lhs
        .transpose()
        .solve_matrix(&rhs.transpose())
        .map_err(|_| Error::DisplacementSingular)?
        .transpose();
    if displacement_residual(rep, &a) != e {
        return Err(Error::DisplacementSingular);
    }
    Ok(a)
}

/// `L·A - A·R` or `A - L·A·R` for a candidate `A`.
pub fn displacement_residual(rep: &DisplacementRep, a: &DenseMatrix) -> DenseMatrix {
    let l = rep.l.to_dense();
    let r = rep.r.to_dense();
    match rep.op {
        DisplacementOp::Sylvester => l.mul(a).sub(&a.mul(&r)),
        DisplacementOp::Stein => a.sub(&l.mul(a).mul(&r)),
    }
}

/// Dense solve of `A x = y`.
pub fn dense_solve(a: &DenseMatrix, y: &[Fp]) -> Result<Vec<Fp>> {
    a.solve(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::chebyshev_spec;
    use crate::recurrence::RDescriptor;

    fn fps(v: &[i64]) -> Vec<Fp> {
        v.iter().map(|&x| Fp::from_i64(x)).collect()
    }

    #[test]
    fn chebyshev_matrix() {
        let a = dense_from_spec(&chebyshev_spec(4, RDescriptor::Shift(4))).unwrap();
        let expect = DenseMatrix::from_i64_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[-1, 0, 2, 0], &[0, -3, 0, 4]]);
        assert_eq!(a, expect);
    }

    #[test]
    fn degenerate_specs() {
        let g = vec![vec![Poly::one()]; 3];
        let c = DenseMatrix::from_i64_rows(&[&[1, 2], &[0, 1], &[3, 0]]);
        let d = DenseMatrix::from_i64_rows(&[&[1, 1, 0], &[0, 2, 5]]);
        let spec = RecurrenceSpec::new(0, (0, 0), g.clone(), c.clone(), d.clone(), RDescriptor::Shift(3)).unwrap();
        assert_eq!(dense_from_spec(&spec).unwrap(), c.mul(&d));
        let zero = RecurrenceSpec::new(0, (0, 0), g, DenseMatrix::zeros(3, 0), DenseMatrix::zeros(0, 3), RDescriptor::Shift(3))
            .unwrap();
        assert!(dense_from_spec(&zero).unwrap().is_zero());
    }

    #[test]
    fn cauchy_and_stein() {
        let rep = DisplacementRep::new(
            DisplacementOp::Sylvester,
            RDescriptor::Diagonal(fps(&[2, 3])),
            RDescriptor::Diagonal(fps(&[0, 1])),
            DenseMatrix::from_i64_rows(&[&[1], &[1]]),
            DenseMatrix::from_i64_rows(&[&[1, 1]]),
        )
        .unwrap();
        let a = dense_from_displacement(&rep).unwrap();
        let (h, t) = (Fp::new(2).inv(), Fp::new(3).inv());
        assert_eq!(a, DenseMatrix::from_rows(&[vec![h, Fp::ONE], vec![t, h]], 2));
        assert_eq!(dense_solve(&a, &fps(&[1, 0])).unwrap(), fps(&[-6, 4]));
        let c = DenseMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let stein = DisplacementRep::new(
            DisplacementOp::Stein,
            RDescriptor::Diagonal(fps(&[0, 0])),
            RDescriptor::Diagonal(fps(&[5, 7])),
            c.clone(),
            DenseMatrix::identity(2),
        )
        .unwrap();
        assert_eq!(dense_from_displacement(&stein).unwrap(), c);
        assert!(dense_solve(&DenseMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]), &fps(&[1, 1])).is_err());
    }
}
