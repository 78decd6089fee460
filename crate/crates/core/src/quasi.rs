//! Recursive quasiseparable matrices and the resolvent `Bᵀ(XI - R)^{-1}C`.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::evaltree::EvalTree;
use crate::field::Fp;
use crate::poly::Poly;
use crate::polymat::PolyMat;

/// Split halves with low-rank off-diagonal blocks `R21 = U_L·V_Lᵀ`, `R12 = U_U·V_Uᵀ`.
#[derive(Clone, Debug)]
pub struct QuasiNode {
    pub r11: QuasiSep,
    pub r22: QuasiSep,
    pub ul: DenseMatrix,
    pub vl: DenseMatrix,
    pub uu: DenseMatrix,
    pub vu: DenseMatrix,
}

/// Quasiseparable matrix: a dense leaf or a recursive split at `n/2`.
#[derive(Clone, Debug)]
pub enum QuasiSep {
    Leaf(DenseMatrix),
    Node(Box<QuasiNode>),
}

impl QuasiSep {
    /// Factors the off-diagonal blocks recursively; fails if any has rank above `t`.
    pub fn from_dense(m: &DenseMatrix, t: usize) -> Result<Self> {
        assert!(m.is_square());
        let n = m.rows();
        if n <= (2 * t).max(1) {
            return Ok(QuasiSep::Leaf(m.clone()));
        }
        let n1 = n / 2;
        let (ul, vl) = m.block(n1, n, 0, n1).rank_factor();
        let (uu, vu) = m.block(0, n1, n1, n).rank_factor();
        for rank in [ul.cols(), uu.cols()] {
            if rank > t {
                return Err(Error::RankExceeded { rank, order: t });
            }
        }
        Ok(QuasiSep::Node(Box::new(QuasiNode {
            r11: QuasiSep::from_dense(&m.block(0, n1, 0, n1), t)?,
            r22: QuasiSep::from_dense(&m.block(n1, n, n1, n), t)?,
            ul,
            vl,
            uu,
            vu,
        })))
    }

    /// Assembles from explicit halves and factor pairs.
    pub fn from_parts(r11: QuasiSep, r22: QuasiSep, ul: DenseMatrix, vl: DenseMatrix, uu: DenseMatrix, vu: DenseMatrix) -> Result<Self> {
        let (n1, n2) = (r11.size(), r22.size());
        let ok = ul.rows() == n2
            && vl.rows() == n1
            && uu.rows() == n1
            && vu.rows() == n2
            && ul.cols() == vl.cols()
            && uu.cols() == vu.cols();
        if !ok {
            return Err(Error::Dimension("quasiseparable factor shapes".into()));
        }
        Ok(QuasiSep::Node(Box::new(QuasiNode { r11, r22, ul, vl, uu, vu })))
    }

    pub fn size(&self) -> usize {
        match self {
            QuasiSep::Leaf(m) => m.rows(),
            QuasiSep::Node(nd) => nd.r11.size() + nd.r22.size(),
        }
    }

    /// Widest off-diagonal factor anywhere in the tree.
    pub fn order(&self) -> usize {
        match self {
            QuasiSep::Leaf(_) => 0,
            QuasiSep::Node(nd) => nd
                .ul
                .cols()
                .max(nd.uu.cols())
                .max(nd.r11.order())
                .max(nd.r22.order()),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            QuasiSep::Leaf(m) => m.clone(),
            QuasiSep::Node(nd) => {
                let n1 = nd.r11.size();
                let mut out = DenseMatrix::zeros(self.size(), self.size());
                out.set_block(0, 0, &nd.r11.to_dense());
                out.set_block(n1, n1, &nd.r22.to_dense());
                out.set_block(n1, 0, &nd.ul.mul(&nd.vl.transpose()));
                out.set_block(0, n1, &nd.uu.mul(&nd.vu.transpose()));
                out
            }
        }
    }

    pub fn matvec(&self, x: &[Fp]) -> Vec<Fp> {
        match self {
            QuasiSep::Leaf(m) => m.matvec(x),
            QuasiSep::Node(nd) => {
                let n1 = nd.r11.size();
                let (x1, x2) = x.split_at(n1);
                let mut y1 = nd.r11.matvec(x1);
                let mut y2 = nd.r22.matvec(x2);
                let up = nd.uu.matvec(&nd.vu.vecmat(x2));
                let lo = nd.ul.matvec(&nd.vl.vecmat(x1));
                y1.iter_mut().zip(up).for_each(|(a, b)| *a += b);
                y2.iter_mut().zip(lo).for_each(|(a, b)| *a += b);
                y1.extend(y2);
                y1
            }
        }
    }

    /// Transpose: halves transpose and the factor roles swap.
    pub fn transpose(&self) -> QuasiSep {
        match self {
            QuasiSep::Leaf(m) => QuasiSep::Leaf(m.transpose()),
            QuasiSep::Node(nd) => QuasiSep::Node(Box::new(QuasiNode {
                r11: nd.r11.transpose(),
                r22: nd.r22.transpose(),
                ul: nd.vu.clone(),
                vl: nd.uu.clone(),
                uu: nd.vl.clone(),
                vu: nd.ul.clone(),
            })),
        }
    }

    /// `P·R·P` for the reversal permutation, rebuilt at the given order.
    pub fn reversed(&self, t: usize) -> Result<QuasiSep> {
        let d = self.to_dense();
        let n = d.rows();
        QuasiSep::from_dense(&DenseMatrix::from_fn(n, n, |i, j| d[(n - 1 - i, n - 1 - j)]), t)
    }
}

/// Rational matrix `num / den`.
#[derive(Clone, Debug)]
pub struct Resolvent {
    pub num: PolyMat,
    pub den: Poly,
}

/// `Bᵀ(XI - R)^{-1}C` as a polynomial matrix over the monic `det(XI - R)`.
pub fn resolvent(b: &DenseMatrix, r: &QuasiSep, c: &DenseMatrix) -> Resolvent {
    assert_eq!(b.rows(), r.size());
    assert_eq!(c.rows(), r.size());
    match r {
        QuasiSep::Leaf(m) => leaf_resolvent(b, m, c),
        QuasiSep::Node(nd) => node_resolvent(b, nd, c),
    }
}

fn leaf_resolvent(b: &DenseMatrix, m: &DenseMatrix, c: &DenseMatrix) -> Resolvent {
    let n = m.rows();
    let (k, k2) = (b.cols(), c.cols());
    let mut pts = Vec::with_capacity(n + 1);
    let mut dens = Vec::with_capacity(n + 1);
    let mut nums: Vec<DenseMatrix> = Vec::with_capacity(n + 1);
    let mut xi = 0u64;
    while pts.len() < n + 1 {
        let z = Fp::new(xi);
        xi += 1;
        let a = DenseMatrix::identity(n).scale(z).sub(m);
        let det = a.det();
        if det.is_zero() {
            continue;
        }
        let w = a.solve_matrix(c).expect("nonzero determinant");
        nums.push(b.transpose().mul(&w).scale(det));
        dens.push(det);
        pts.push(z);
    }
    assemble(&pts, &dens, &nums, k, k2)
}

fn assemble(pts: &[Fp], dens: &[Fp], nums: &[DenseMatrix], k: usize, k2: usize) -> Resolvent {
    let tree = EvalTree::new(pts);
    let den = tree.interpolate(dens).expect("distinct points");
    let num = PolyMat::from_fn(k, k2, |i, j| {
        let vals: Vec<Fp> = nums.iter().map(|m| m[(i, j)]).collect();
        tree.interpolate(&vals).expect("distinct points")
    });
    Resolvent { num, den }
}

fn node_resolvent(b: &DenseMatrix, nd: &QuasiNode, c: &DenseMatrix) -> Resolvent {
    let n1 = nd.r11.size();
    let n = n1 + nd.r22.size();
    let (k, k2) = (b.cols(), c.cols());
    let (a, bw) = (nd.ul.cols(), nd.uu.cols());
    let b1 = b.block(0, n1, 0, k);
    let b2 = b.block(n1, n, 0, k);
    let c1 = c.block(0, n1, 0, k2);
    let c2 = c.block(n1, n, 0, k2);
    let left = resolvent(&DenseMatrix::hcat(&[&b1, &nd.vl]), &nd.r11, &DenseMatrix::hcat(&[&c1, &nd.uu]));
    let right = resolvent(&DenseMatrix::hcat(&[&b2, &nd.vu]), &nd.r22, &DenseMatrix::hcat(&[&c2, &nd.ul]));
    let mut pts = Vec::with_capacity(n + 1);
    let mut dens = Vec::with_capacity(n + 1);
    let mut nums = Vec::with_capacity(n + 1);
    let mut xi = 0u64;
    while pts.len() < n + 1 {
        let z = Fp::new(xi);
        xi += 1;
        let (d1, d2) = (left.den.eval(z), right.den.eval(z));
        let (Some(i1), Some(i2)) = (d1.try_inv(), d2.try_inv()) else {
            continue;
        };
        let x1 = left.num.eval(z).scale(i1);
        let x2 = right.num.eval(z).scale(i2);
        let m1 = x1.block(0, k, 0, k2).add(&x2.block(0, k, 0, k2));
        let m2 = DenseMatrix::hcat(&[&x2.block(0, k, k2, k2 + a), &x1.block(0, k, k2, k2 + bw)]);
        let mut m3 = DenseMatrix::zeros(a + bw, a + bw);
        m3.set_block(0, a, &x1.block(k, k + a, k2, k2 + bw));
        m3.set_block(a, 0, &x2.block(k, k + bw, k2, k2 + a));
        let m4 = DenseMatrix::vcat(&[&x1.block(k, k + a, 0, k2), &x2.block(k, k + bw, 0, k2)]);
        let inner = DenseMatrix::identity(a + bw).sub(&m3);
        let det = inner.det();
        if det.is_zero() {
            continue;
        }
        let value = m1.add(&m2.mul(&inner.solve_matrix(&m4).expect("nonzero determinant")));
        let den = d1 * d2 * det;
        nums.push(value.scale(den));
        dens.push(den);
        pts.push(z);
    }
    assemble(&pts, &dens, &nums, k, k2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::random_quasi;
    use crate::rng::SplitMix64;

    #[test]
    fn scalar_resolvent() {
        let r = QuasiSep::Leaf(DenseMatrix::from_i64_rows(&[&[5]]));
        let one = DenseMatrix::from_i64_rows(&[&[1]]);
        let res = resolvent(&one, &r, &one);
        assert_eq!(res.num[(0, 0)], Poly::one());
        assert_eq!(res.den, Poly::from_i64s(&[-5, 1]));
    }

    #[test]
    fn diagonal_partial_fractions() {
        let r = QuasiSep::from_dense(&DenseMatrix::diag(&[Fp::new(1), Fp::new(2)]), 0).unwrap();
        let ones = DenseMatrix::from_i64_rows(&[&[1], &[1]]);
        let res = resolvent(&ones, &r, &ones);
        assert_eq!(res.num[(0, 0)], Poly::from_i64s(&[-3, 2]));
        assert_eq!(res.den, Poly::from_i64s(&[2, -3, 1]));
    }

    #[test]
    fn quasi_roundtrip_and_matvec() {
        let mut rng = SplitMix64::new(1);
        for t in [1, 2] {
            let q = random_quasi(&mut rng, 19, t);
            let d = q.to_dense();
            let q2 = QuasiSep::from_dense(&d, t).unwrap();
            assert_eq!(q2.to_dense(), d);
            assert!(q2.order() <= t);
            let v = rng.fp_vec(19);
            assert_eq!(q.matvec(&v), d.matvec(&v));
            assert_eq!(q.transpose().to_dense(), d.transpose());
        }
        let full = DenseMatrix::from_fn(6, 6, |_, _| rng.fp());
        assert!(matches!(QuasiSep::from_dense(&full, 1), Err(Error::RankExceeded { .. })));
    }

    #[test]
    fn resolvent_matches_dense_solves() {
        let mut rng = SplitMix64::new(9);
        for (n, t) in [(8usize, 2usize), (13, 1)] {
            let q = random_quasi(&mut rng, n, t);
            let d = q.to_dense();
            let b = DenseMatrix::from_fn(n, 2, |_, _| rng.fp());
            let c = DenseMatrix::from_fn(n, 1, |_, _| rng.fp());
            let res = resolvent(&b, &q, &c);
            assert_eq!(res.den.degree(), Some(n));
            assert!(res.den.is_monic());
            for _ in 0..5 {
                let xi = rng.fp();
                let a = DenseMatrix::identity(n).scale(xi).sub(&d);
                let w = a.solve_matrix(&c).unwrap();
                let val = b.transpose().mul(&w);
                let den = res.den.eval(xi);
                assert_eq!(den, a.det());
                for i in 0..2 {
                    assert_eq!(res.num[(i, 0)].eval(xi), den * val[(i, 0)]);
                }
            }
        }
    }
}
