//! Small dense matrices over [`Fp`] with exact elimination.

use crate::error::{Error, Result};
use crate::field::{dot, Fp};
use std::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Fp>,
}

impl std::fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Fp;
    fn index(&self, (i, j): (usize, usize)) -> &Fp {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fp {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![Fp::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Fp::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Fp) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds from row vectors of equal length; `cols` disambiguates the empty case.
    pub fn from_rows(rows: &[Vec<Fp>], cols: usize) -> Self {
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |i, j| Fp::from_i64(rows[i][j]))
    }

    /// Single column.
    pub fn column(v: &[Fp]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i])
    }

    /// Diagonal matrix.
    pub fn diag(v: &[Fp]) -> Self {
        let mut m = Self::zeros(v.len(), v.len());
        for (i, &x) in v.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Fp] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Fp] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Fp> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Fp]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matvec(&self, v: &[Fp]) -> Vec<Fp> {
        assert_eq!(v.len(), self.cols, "matvec length");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `Mᵀ v`.
    pub fn vecmat(&self, v: &[Fp]) -> Vec<Fp> {
        assert_eq!(v.len(), self.rows, "vecmat length");
        let mut out = vec![Fp::ZERO; self.cols];
        for (i, &s) in v.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += s * a;
            }
        }
        out
    }

    pub fn mul(&self, o: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, o.rows, "matmul shapes");
        let p = crate::field::modulus() as u64;
        let mut out = DenseMatrix::zeros(self.rows, o.cols);
        let mut acc = vec![0u64; o.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self[(i, k)].value() as u64;
                if a == 0 {
                    continue;
                }
                for (s, b) in acc.iter_mut().zip(o.row(k)) {
                    *s = (*s + a * b.value() as u64) % p;
                }
            }
            for (j, s) in acc.iter().enumerate() {
                out[(i, j)] = Fp::new(*s);
            }
        }
        out
    }

    pub fn add(&self, o: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: Fp) -> DenseMatrix {
        let data = self.data.iter().map(|&a| a * s).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> DenseMatrix {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &DenseMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Columns selected by index.
    pub fn select_cols(&self, idx: &[usize]) -> DenseMatrix {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// Horizontal concatenation.
    pub fn hcat(parts: &[&DenseMatrix]) -> DenseMatrix {
        let rows = parts.first().map_or(0, |p| p.rows);
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = DenseMatrix::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hcat row mismatch");
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    /// Vertical concatenation.
    pub fn vcat(parts: &[&DenseMatrix]) -> DenseMatrix {
        let cols = parts.first().map_or(0, |p| p.cols);
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = DenseMatrix::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vcat column mismatch");
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (DenseMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv();
            for v in m.row_mut(r) {
                *v *= inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    m.axpy_rows(i, r, -m[(i, c)]);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// `M = U·Vᵀ` with `U` made of pivot columns and `Vᵀ` the nonzero echelon rows.
    pub fn rank_factor(&self) -> (DenseMatrix, DenseMatrix) {
        let (e, piv) = self.rref();
        let u = self.select_cols(&piv);
        let v = DenseMatrix::from_fn(self.cols, piv.len(), |i, j| e[(j, i)]);
        (u, v)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[dst] += s · row[src]`.
    fn axpy_rows(&mut self, dst: usize, src: usize, s: Fp) {
        let c = self.cols;
        let (d, sr) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * c);
            (&mut lo[dst * c..(dst + 1) * c], &hi[..c])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * c);
            (&mut hi[..c], &lo[src * c..(src + 1) * c])
        };
        for (x, &y) in d.iter_mut().zip(sr) {
            *x += s * y;
        }
    }

    pub fn det(&self) -> Fp {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Fp::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Fp::ZERO;
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)];
            det *= piv;
            let inv = piv.inv();
            for i in c + 1..n {
                let f = m[(i, c)] * inv;
                if !f.is_zero() {
                    m.axpy_rows(i, c, -f);
                }
            }
        }
        det
    }

    /// Solves `M X = B` for square nonsingular `M`.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        assert!(self.is_square() && b.rows == self.rows);
        let n = self.rows;
        let aug = DenseMatrix::hcat(&[self, b]);
        let (e, piv) = aug.rref();
        if n > 0 && (piv.len() < n || piv[n - 1] >= n) {
            return Err(Error::Singular);
        }
        Ok(e.block(0, n, n, n + b.cols))
    }

    /// Solves `M x = y` for square nonsingular `M`.
    pub fn solve(&self, y: &[Fp]) -> Result<Vec<Fp>> {
        Ok(self.solve_matrix(&DenseMatrix::column(y))?.col(0))
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        self.solve_matrix(&DenseMatrix::identity(self.rows))
    }

    /// Inverse by elimination without row exchanges; fails on a vanishing leading minor.
    pub fn inverse_no_pivot(&self) -> Result<DenseMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = DenseMatrix::hcat(&[self, &DenseMatrix::identity(n)]);
        for c in 0..n {
            let piv = m[(c, c)];
            let inv = piv.try_inv().ok_or(Error::NotStronglyRegular)?;
            for i in c + 1..n {
                let f = m[(i, c)] * inv;
                if !f.is_zero() {
                    m.axpy_rows(i, c, -f);
                }
            }
        }
        for c in (0..n).rev() {
            let inv = m[(c, c)].inv();
            for v in m.row_mut(c) {
                *v *= inv;
            }
            for i in 0..c {
                let f = m[(i, c)];
                if !f.is_zero() {
                    m.axpy_rows(i, c, -f);
                }
            }
        }
        Ok(m.block(0, n, n, 2 * n))
    }

    /// Some solution of `M x = y` (free variables zero), or `None` if inconsistent.
    pub fn solve_any(&self, y: &[Fp]) -> Option<Vec<Fp>> {
        assert_eq!(y.len(), self.rows);
        let aug = DenseMatrix::hcat(&[self, &DenseMatrix::column(y)]);
        let (e, piv) = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Fp::ZERO; self.cols];
        for (r, &c) in piv.iter().enumerate() {
            x[c] = e[(r, self.cols)];
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_inverse() {
        let half = Fp::new(2).inv();
        let third = Fp::new(3).inv();
        let a = DenseMatrix::from_rows(&[vec![half, Fp::ONE], vec![third, half]], 2);
        let x = a.solve(&[Fp::ONE, Fp::ZERO]).unwrap();
        assert_eq!(x, vec![Fp::from_i64(-6), Fp::from_i64(4)]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, DenseMatrix::from_i64_rows(&[&[-6, 12], &[4, -6]]));
        assert_eq!(a.mul(&inv), DenseMatrix::identity(2));
        assert_eq!(a.inverse_no_pivot().unwrap(), inv);
    }

    #[test]
    fn singular_detection() {
        let s = DenseMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.solve(&[Fp::ONE, Fp::ONE]), Err(Error::Singular));
        assert_eq!(s.det(), Fp::ZERO);
        let p = DenseMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(p.inverse_no_pivot(), Err(Error::NotStronglyRegular));
        assert_eq!(p.det(), Fp::from_i64(-1));
    }

    #[test]
    fn rank_factor_reconstructs() {
        let m = DenseMatrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (u, v) = m.rank_factor();
        assert_eq!(u.cols(), 2);
        assert_eq!(u.mul(&v.transpose()), m);
    }

    #[test]
    fn consistent_solutions() {
        let m = DenseMatrix::from_i64_rows(&[&[1, 1], &[2, 2]]);
        let x = m.solve_any(&[Fp::new(3), Fp::new(6)]).unwrap();
        assert_eq!(m.matvec(&x), vec![Fp::new(3), Fp::new(6)]);
        assert!(m.solve_any(&[Fp::new(3), Fp::new(5)]).is_none());
    }
}
