//! Fitting a width-`t` recurrence to a dense matrix.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::poly::Poly;
use crate::recurrence::{RDescriptor, RecurrenceSpec};

/// Outcome of a fit: a regenerating spec, or the rows that admit no width-`t` relation.
#[derive(Clone, Debug)]
pub struct FitReport {
    pub spec: Option<RecurrenceSpec>,
    pub failed_rows: Vec<usize>,
}

impl FitReport {
    pub fn is_success(&self) -> bool {
        self.spec.is_some()
    }
}

/// Finds `g_{i,j}` with `deg g_{i,j} ≤ j` and `a_i = Σ_{j=1..t} g_{i,j}·a_{i-j} mod X^N` for all `i ≥ t`.
///
/// The first `t` rows become the error term and must satisfy `deg a_i ≤ i`.
pub fn recover_recurrence(a: &DenseMatrix, t: usize) -> Result<FitReport> {
    let (rows, n) = (a.rows(), a.cols());
    let unknowns = t * (t + 3) / 2;
    if t > 0 && n <= unknowns && rows > t {
        return Err(Error::InsufficientConstraints);
    }
    let polys: Vec<Poly> = (0..rows).map(|i| Poly::from_slice(a.row(i))).collect();
    let heads = t.min(rows);
    let bad_heads: Vec<usize> = (0..heads).filter(|&i| polys[i].degree().is_some_and(|d| d > i)).collect();
    if !bad_heads.is_empty() {
        return Ok(FitReport { spec: None, failed_rows: bad_heads });
    }
    let mut g = vec![vec![Poly::one()]; heads];
    let mut failed = Vec::new();
    for i in heads..rows {
        match fit_row(&polys, i, t, n) {
            Some(row) => g.push(row),
            None => {
                failed.push(i);
                g.push(vec![Poly::one()]);
            }
        }
    }
    if !failed.is_empty() {
        return Ok(FitReport { spec: None, failed_rows: failed });
    }
    let r = heads.max(1);
    let mut c = DenseMatrix::zeros(rows, r);
    let mut d = DenseMatrix::zeros(r, n);
    for i in 0..heads {
        c[(i, i)] = Fp::ONE;
        d.row_mut(i).copy_from_slice(a.row(i));
    }
    let spec = RecurrenceSpec::new(t, (1, 0), g, c, d, RDescriptor::Shift(n))?;
    Ok(FitReport { spec: Some(spec), failed_rows: Vec::new() })
}

/// Coefficients for row `i` (leading `1` followed by `g_{i,1..t}`), or `None` if inconsistent.
fn fit_row(polys: &[Poly], i: usize, t: usize, n: usize) -> Option<Vec<Poly>> {
    let mut cols: Vec<(usize, usize)> = Vec::new();
    for j in 1..=t.min(i) {
        for l in 0..=j {
            cols.push((j, l));
        }
    }
    let m = DenseMatrix::from_fn(n, cols.len(), |k, u| {
        let (j, l) = cols[u];
        if k >= l {
            polys[i - j].coeff(k - l)
        } else {
            Fp::ZERO
        }
    });
    let target = polys[i].to_vec(n);
    let sol = m.solve_any(&target)?;
    let mut row = vec![Poly::one()];
    for j in 1..=t.min(i) {
        let coeffs: Vec<Fp> = cols.iter().zip(&sol).filter(|((jj, _), _)| *jj == j).map(|(_, &v)| v).collect();
        row.push(Poly::from_coeffs(coeffs));
    }
    Some(row)
}
