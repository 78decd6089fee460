//! Orthogonal polynomial transforms, Stirling and Bernoulli numbers, bivariate evaluation.

use std::collections::HashSet;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::krylov::KrylovOperator;
use crate::multiply::{forward_mult, transpose_mult};
use crate::poly::Poly;
use crate::recurrence::{build_dyadic_tree, BandMatrix, DyadicTree, RDescriptor, RecurrenceSpec};

/// Polynomials `a_0 = 1`, `a_i = (α_i X + β_i)·a_{i-1} + γ_i·a_{i-2}`, sampled at `points`.
#[derive(Clone, Debug)]
pub struct OrthoFamily {
    pub alpha: Vec<Fp>,
    pub beta: Vec<Fp>,
    pub gamma: Vec<Fp>,
    pub points: Vec<Fp>,
}

impl OrthoFamily {
    /// Chebyshev polynomials of the first kind, one per point.
    pub fn chebyshev(points: Vec<Fp>) -> Self {
        let n = points.len();
        let alpha = (0..n).map(|i| if i == 1 { Fp::ONE } else { Fp::new(2) }).collect();
        OrthoFamily { alpha, beta: vec![Fp::ZERO; n], gamma: (0..n).map(|i| if i >= 2 { -Fp::ONE } else { Fp::ZERO }).collect(), points }
    }

    /// Number of polynomials.
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Width-2 spec over `diag(points)` whose rows are `(a_i(z_j))_j`.
    pub fn spec(&self) -> Result<RecurrenceSpec> {
        let m = self.len();
        if self.beta.len() != m || self.gamma.len() != m {
            return Err(Error::InvalidSpec("recurrence coefficient lists differ in length".into()));
        }
        let mut seen = HashSet::new();
        if !self.points.iter().all(|p| seen.insert(p.value())) {
            return Err(Error::RepeatedPoints);
        }
        let g = (0..m)
            .map(|i| {
                let mut row = vec![Poly::one()];
                if i >= 1 {
                    row.push(Poly::from_coeffs(vec![self.beta[i], self.alpha[i]]));
                }
                if i >= 2 {
                    row.push(Poly::constant(self.gamma[i]));
                }
                row
            })
            .collect();
        let mut c = DenseMatrix::zeros(m, 1);
        if m > 0 {
            c[(0, 0)] = Fp::ONE;
        }
        let d = DenseMatrix::from_fn(1, self.points.len(), |_, _| Fp::ONE);
        RecurrenceSpec::new(2, (1, 0), g, c, d, RDescriptor::Diagonal(self.points.clone()))
    }

    /// `a_i(z)` by running the recurrence at a single point.
    pub fn eval_all(&self, z: Fp) -> Vec<Fp> {
        let mut out: Vec<Fp> = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let v = match i {
                0 => Fp::ONE,
                1 => (self.alpha[1] * z + self.beta[1]) * out[0],
                _ => (self.alpha[i] * z + self.beta[i]) * out[i - 1] + self.gamma[i] * out[i - 2],
            };
            out.push(v);
        }
        out
    }
}

/// Which product an orthogonal transform computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `A·b` with `A[i][j] = a_i(z_j)`.
    Forward,
    /// `Aᵀ·b`.
    Projection,
}

/// A family prepared for repeated transforms.
pub struct OrthoTransform {
    spec: RecurrenceSpec,
    tree: DyadicTree,
}

impl OrthoTransform {
    pub fn new(family: &OrthoFamily) -> Result<Self> {
        let spec = family.spec()?;
        let tree = build_dyadic_tree(&spec)?;
        Ok(OrthoTransform { spec, tree })
    }

    pub fn apply(&self, b: &[Fp], direction: Direction) -> Result<Vec<Fp>> {
        match direction {
            Direction::Forward => forward_mult(&self.spec, &self.tree, b),
            Direction::Projection => transpose_mult(&self.spec, &self.tree, b),
        }
    }
}

/// One-shot [`OrthoTransform`].
pub fn orthogonal_transform(family: &OrthoFamily, b: &[Fp], direction: Direction) -> Result<Vec<Fp>> {
    OrthoTransform::new(family)?.apply(b, direction)
}

/// `D + S` with `D = diag(0, 1, …)` and `S` the down-shift, whose Krylov matrix from `e_0` is `Wᵀ`.
fn stirling_operator(n: usize) -> Result<KrylovOperator> {
    let band = BandMatrix::new(n, 1, true, |i, j| if i == j { Fp::new(i as u64) } else { Fp::ONE });
    let mut e0 = vec![Fp::ZERO; n];
    if n > 0 {
        e0[0] = Fp::ONE;
    }
    KrylovOperator::new(&RDescriptor::Band(band), &e0)
}

/// `W·x`, or `Wᵀ·x` when `transposed`, for `W[i][k]` the Stirling numbers of the second kind.
pub fn stirling_apply(n: usize, x: &[Fp], transposed: bool) -> Result<Vec<Fp>> {
    if x.len() != n {
        return Err(Error::Dimension(format!("expected length {n}, got {}", x.len())));
    }
    let k = stirling_operator(n)?;
    if transposed {
        k.apply(x)
    } else {
        k.apply_transpose(x)
    }
}

/// `B_0, …, B_{n-1}` reduced mod `p`, with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Result<Vec<Fp>> {
    if n as u64 >= crate::field::modulus() as u64 {
        return Err(Error::Unsupported("index reaches the field characteristic".into()));
    }
    let mut x = Vec::with_capacity(n);
    let mut fact = Fp::ONE;
    for k in 0..n {
        if k > 0 {
            fact *= Fp::new(k as u64);
        }
        let sign = if k % 2 == 0 { Fp::ONE } else { -Fp::ONE };
        x.push(sign * fact * Fp::new(k as u64 + 1).inv());
    }
    stirling_apply(n, &x, false)
}

/// Spec over `X^{d²}` whose row `i` lists the monomials `x_i^a·y_i^b` at column `a + d·b`.
///
/// Row `i` satisfies `(1/(xy) - X/y - X^d/x + X^{d+1})·a_i = 1/(xy) - (x^{d-1}/y)·X^d`.
pub fn bivariate_eval_spec(points: &[(Fp, Fp)], d: usize) -> Result<RecurrenceSpec> {
    let n = d * d;
    let rows = points.len();
    let r = if d < n { 2 } else { 1 };
    let mut g = Vec::with_capacity(rows);
    let mut c = DenseMatrix::zeros(rows, r);
    for (i, &(x, y)) in points.iter().enumerate() {
        if x.is_zero() || y.is_zero() {
            return Err(Error::ZeroCoordinate(i));
        }
        let (xi, yi) = (x.inv(), y.inv());
        let mut lead = vec![Fp::ZERO; d + 2];
        lead[0] = xi * yi;
        lead[1] -= yi;
        lead[d] -= xi;
        lead[d + 1] += Fp::ONE;
        let mut row = vec![Poly::from_coeffs(lead)];
        if i >= 1 {
            row.push(Poly::zero());
        }
        g.push(row);
        c[(i, 0)] = xi * yi;
        if r == 2 {
            c[(i, 1)] = -(x.pow(d as u64 - 1) * yi);
        }
    }
    let mut dm = DenseMatrix::zeros(r, n);
    if n > 0 {
        dm[(0, 0)] = Fp::ONE;
    }
    if r == 2 {
        dm[(1, d)] = Fp::ONE;
    }
    RecurrenceSpec::new(1, (0, d + 1), g, c, dm, RDescriptor::Shift(n))
}

/// Values of the bivariate polynomial with coefficients `f[a + d·b]` at each point.
pub fn bivariate_eval(points: &[(Fp, Fp)], d: usize, f: &[Fp]) -> Result<Vec<Fp>> {
    let spec = bivariate_eval_spec(points, d)?;
    let tree = build_dyadic_tree(&spec)?;
    forward_mult(&spec, &tree, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dense_from_spec;
    use crate::rng::SplitMix64;

    fn fps(v: &[i64]) -> Vec<Fp> {
        v.iter().map(|&x| Fp::from_i64(x)).collect()
    }

    fn stirling_table(n: usize) -> Vec<Vec<Fp>> {
        let mut s = vec![vec![Fp::ZERO; n]; n];
        if n > 0 {
            s[0][0] = Fp::ONE;
        }
        for i in 1..n {
            for k in 1..n {
                s[i][k] = Fp::new(k as u64) * s[i - 1][k] + s[i - 1][k - 1];
            }
        }
        s
    }

    #[test]
    fn chebyshev_transform() {
        let fam = OrthoFamily::chebyshev(fps(&[0, 1, 2, 3]));
        let out = orthogonal_transform(&fam, &fps(&[0, 0, 1, 0]), Direction::Projection).unwrap();
        assert_eq!(out, fps(&[-1, 1, 7, 17]));
        let ones = orthogonal_transform(&fam, &fps(&[1, 0, 0, 0]), Direction::Projection).unwrap();
        assert_eq!(ones, fps(&[1, 1, 1, 1]));
        let b = fps(&[3, -1, 4, 1]);
        let c = fps(&[2, 7, 1, 8]);
        let ab = orthogonal_transform(&fam, &b, Direction::Forward).unwrap();
        let atc = orthogonal_transform(&fam, &c, Direction::Projection).unwrap();
        let lhs: Fp = c.iter().zip(&ab).map(|(&x, &y)| x * y).sum();
        let rhs: Fp = b.iter().zip(&atc).map(|(&x, &y)| x * y).sum();
        assert_eq!(lhs, rhs);
        let repeated = OrthoFamily::chebyshev(fps(&[1, 1]));
        assert_eq!(repeated.spec().unwrap_err(), Error::RepeatedPoints);
    }

    #[test]
    fn stirling_rows() {
        let n = 6;
        let table = stirling_table(n);
        assert_eq!(table[3][..4], fps(&[0, 1, 3, 1])[..]);
        assert_eq!(table[4][2], Fp::new(7));
        let mut rng = SplitMix64::new(2);
        let x = rng.fp_vec(n);
        let w = DenseMatrix::from_rows(&table, n);
        assert_eq!(stirling_apply(n, &x, false).unwrap(), w.matvec(&x));
        assert_eq!(stirling_apply(n, &x, true).unwrap(), w.vecmat(&x));
        let mut e0 = vec![Fp::ZERO; n];
        e0[0] = Fp::ONE;
        assert_eq!(stirling_apply(n, &e0, false).unwrap(), e0);
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(8).unwrap();
        assert_eq!(b[0], Fp::ONE);
        assert_eq!(b[1], -Fp::new(2).inv());
        assert_eq!(b[1].value(), 499_122_176);
        assert_eq!(b[2], Fp::new(6).inv());
        assert_eq!(b[3], Fp::ZERO);
        assert_eq!(b[4], -Fp::new(30).inv());
    }

    #[test]
    fn bivariate_rows() {
        let spec = bivariate_eval_spec(&[(Fp::new(2), Fp::new(3))], 2).unwrap();
        assert_eq!(dense_from_spec(&spec).unwrap(), DenseMatrix::from_i64_rows(&[&[1, 2, 3, 6]]));
        let ones = bivariate_eval_spec(&[(Fp::ONE, Fp::ONE)], 3).unwrap();
        assert_eq!(dense_from_spec(&ones).unwrap(), DenseMatrix::from_fn(1, 9, |_, _| Fp::ONE));
        assert_eq!(bivariate_eval_spec(&[(Fp::ZERO, Fp::ONE)], 2).unwrap_err(), Error::ZeroCoordinate(0));
        let mut rng = SplitMix64::new(9);
        let pts: Vec<(Fp, Fp)> = (0..4).map(|_| (rng.nonzero_fp(), rng.nonzero_fp())).collect();
        let f = rng.fp_vec(4);
        let direct: Vec<Fp> = pts.iter().map(|&(x, y)| f[0] + f[1] * x + f[2] * y + f[3] * x * y).collect();
        assert_eq!(bivariate_eval(&pts, 2, &f).unwrap(), direct);
    }
}
