//! Small matrices whose entries are polynomials.

use crate::field::Fp;
use crate::poly::Poly;
use std::ops::{Index, IndexMut};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMat {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl Index<(usize, usize)> for PolyMat {
    type Output = Poly;
    fn index(&self, (i, j): (usize, usize)) -> &Poly {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for PolyMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Poly {
        &mut self.data[i * self.cols + j]
    }
}

impl PolyMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMat { rows, cols, data: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Poly::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        PolyMat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    /// Product, optionally reduced modulo `X^n`.
    pub fn mul_trunc(&self, o: &PolyMat, n: Option<usize>) -> PolyMat {
        assert_eq!(self.cols, o.rows, "polynomial matrix shapes");
        PolyMat::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = Poly::zero();
            for k in 0..self.cols {
                let (a, b) = (&self[(i, k)], &o[(k, j)]);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let prod = match n {
                    Some(n) => a.mul_trunc(b, n),
                    None => a.mul(b),
                };
                acc += &prod;
            }
            acc
        })
    }

    pub fn mul(&self, o: &PolyMat) -> PolyMat {
        self.mul_trunc(o, None)
    }

    pub fn add(&self, o: &PolyMat) -> PolyMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        PolyMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &o[(i, j)])
    }

    /// Every entry times `p`, optionally reduced modulo `X^n`.
    pub fn scale_poly(&self, p: &Poly, n: Option<usize>) -> PolyMat {
        PolyMat::from_fn(self.rows, self.cols, |i, j| match n {
            Some(n) => self[(i, j)].mul_trunc(p, n),
            None => self[(i, j)].mul(p),
        })
    }

    pub fn scale(&self, s: Fp) -> PolyMat {
        PolyMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].scale(s))
    }

    /// Largest entry degree, `None` when all entries vanish.
    pub fn max_degree(&self) -> Option<usize> {
        self.data.iter().filter_map(Poly::degree).max()
    }

    pub fn eval(&self, x: Fp) -> crate::dense::DenseMatrix {
        crate::dense::DenseMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].eval(x))
    }
}
