//! Subproduct trees: multipoint evaluation, its transpose, and interpolation.

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::poly::Poly;

/// Products of linear factors `∏(X - z_i)` over a balanced binary split of the points.
#[derive(Clone, Debug)]
pub struct EvalTree {
    points: Vec<Fp>,
    /// `levels[0]` holds the leaves; the last level holds the root alone.
    levels: Vec<Vec<Poly>>,
}

impl EvalTree {
    pub fn new(points: &[Fp]) -> Self {
        let mut levels = vec![points.iter().map(|&z| Poly::linear_root(z)).collect::<Vec<_>>()];
        if points.is_empty() {
            levels[0].push(Poly::one());
        }
        while levels.last().unwrap().len() > 1 {
            let prev = levels.last().unwrap();
            let next = prev
                .chunks(2)
                .map(|c| if c.len() == 2 { c[0].mul(&c[1]) } else { c[0].clone() })
                .collect();
            levels.push(next);
        }
        EvalTree { points: points.to_vec(), levels }
    }

    pub fn points(&self) -> &[Fp] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn levels(&self) -> &[Vec<Poly>] {
        &self.levels
    }

    /// `∏(X - z_i)` over all points.
    pub fn root(&self) -> &Poly {
        &self.levels.last().unwrap()[0]
    }

    /// Values `p(z_i)` by remaindering down the tree.
    pub fn multipoint_eval(&self, p: &Poly) -> Vec<Fp> {
        if self.points.is_empty() {
            return Vec::new();
        }
        let top = self.levels.len() - 1;
        let mut cur = vec![p.rem(self.root()).expect("monic root")];
        for lvl in (0..top).rev() {
            let nodes = &self.levels[lvl];
            let mut next = Vec::with_capacity(nodes.len());
            for (k, r) in cur.iter().enumerate() {
                for child in [2 * k, 2 * k + 1] {
                    if let Some(m) = nodes.get(child) {
                        next.push(if r.len() <= 32 && m.len() <= 2 {
                            Poly::constant(r.eval(-m.coeff(0)))
                        } else {
                            r.rem(m).expect("monic node")
                        });
                    }
                }
            }
            cur = next;
        }
        cur.into_iter().map(|r| r.coeff(0)).collect()
    }

    /// Coefficients below `X^n` of `Σ w_i / (1 - z_i X)` where `w_i = x_i y_i`.
    pub fn transposed_eval(&self, x: &[Fp], y: &[Fp], n: usize) -> Vec<Fp> {
        assert_eq!(x.len(), self.points.len());
        assert_eq!(y.len(), self.points.len());
        if self.points.is_empty() || n == 0 {
            return vec![Fp::ZERO; n];
        }
        let mut nums: Vec<Poly> = x.iter().zip(y).map(|(&a, &b)| Poly::constant(a * b)).collect();
        for lvl in 0..self.levels.len() - 1 {
            let dens = &self.levels[lvl];
            nums = nums
                .chunks(2)
                .enumerate()
                .map(|(k, c)| {
                    if c.len() == 2 {
                        let dl = reversed(&dens[2 * k]);
                        let dr = reversed(&dens[2 * k + 1]);
                        &c[0].mul(&dr) + &c[1].mul(&dl)
                    } else {
                        c[0].clone()
                    }
                })
                .collect();
        }
        let den = reversed(self.root());
        let inv = den.inv_series(n).expect("constant term one");
        nums[0].mul_trunc(&inv, n).to_vec(n)
    }

    /// The unique polynomial of degree `< n` through `(z_i, v_i)`.
    pub fn interpolate(&self, values: &[Fp]) -> Result<Poly> {
        assert_eq!(values.len(), self.points.len());
        if values.is_empty() {
            return Ok(Poly::zero());
        }
        let dw = self.multipoint_eval(&self.root().derivative());
        let mut cur = Vec::with_capacity(values.len());
        for (&v, &d) in values.iter().zip(&dw) {
            cur.push(Poly::constant(v * d.try_inv().ok_or(Error::RepeatedPoints)?));
        }
        for lvl in 0..self.levels.len() - 1 {
            let nodes = &self.levels[lvl];
            cur = cur
                .chunks(2)
                .enumerate()
                .map(|(k, c)| {
                    if c.len() == 2 {
                        &c[0].mul(&nodes[2 * k + 1]) + &c[1].mul(&nodes[2 * k])
                    } else {
                        c[0].clone()
                    }
                })
                .collect();
        }
        Ok(cur.pop().unwrap())
    }
}

fn reversed(m: &Poly) -> Poly {
    m.reverse(m.degree().unwrap_or(0))
}

/// Evaluates at the points through a fresh tree.
pub fn multipoint_eval(p: &Poly, tree: &EvalTree) -> Vec<Fp> {
    tree.multipoint_eval(p)
}

/// Transposed multipoint evaluation truncated to `n` coefficients.
pub fn transposed_eval(x: &[Fp], y: &[Fp], tree: &EvalTree, n: usize) -> Vec<Fp> {
    tree.transposed_eval(x, y, n)
}

/// Interpolates through `(points[i], values[i])`.
pub fn interpolate(points: &[Fp], values: &[Fp]) -> Result<Poly> {
    EvalTree::new(points).interpolate(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn fps(v: &[u64]) -> Vec<Fp> {
        v.iter().map(|&x| Fp::new(x)).collect()
    }

    #[test]
    fn evaluation_examples() {
        let tree = EvalTree::new(&fps(&[0, 1, 2]));
        assert_eq!(tree.multipoint_eval(&Poly::from_i64s(&[1, 0, 1])), fps(&[1, 2, 5]));
        assert_eq!(tree.multipoint_eval(&Poly::from_i64s(&[7])), fps(&[7, 7, 7]));
        assert_eq!(tree.multipoint_eval(tree.root()), fps(&[0, 0, 0]));
    }

    #[test]
    fn transposed_examples() {
        let t1 = EvalTree::new(&fps(&[2]));
        assert_eq!(t1.transposed_eval(&fps(&[1]), &fps(&[1]), 3), fps(&[1, 2, 4]));
        let t2 = EvalTree::new(&fps(&[1, 2]));
        assert_eq!(t2.transposed_eval(&fps(&[1, 1]), &fps(&[1, 1]), 2), fps(&[2, 3]));
        assert_eq!(t2.transposed_eval(&fps(&[0, 0]), &fps(&[5, 1]), 2), fps(&[0, 0]));
    }

    #[test]
    fn root_is_product_of_children() {
        let tree = EvalTree::new(&fps(&[3, 5, 7, 11, 13]));
        for w in tree.levels().windows(2) {
            for (k, parent) in w[1].iter().enumerate() {
                let left = &w[0][2 * k];
                let prod = match w[0].get(2 * k + 1) {
                    Some(r) => left.mul(r),
                    None => left.clone(),
                };
                assert_eq!(&prod, parent);
            }
        }
    }

    #[test]
    fn random_agreement_with_horner_and_power_sums() {
        let mut rng = SplitMix64::new(5);
        for n in [1usize, 7, 64, 300] {
            let pts = rng.distinct_fp_vec(n);
            let tree = EvalTree::new(&pts);
            let p = Poly::from_coeffs(rng.fp_vec(n + 3));
            let vals = tree.multipoint_eval(&p);
            for (z, v) in pts.iter().zip(&vals) {
                assert_eq!(p.eval(*z), *v);
            }
            let back = tree.interpolate(&vals).unwrap();
            assert_eq!(back, p.rem(tree.root()).unwrap());
            if n <= 64 {
                let x = rng.fp_vec(n);
                let y = rng.fp_vec(n);
                let out = tree.transposed_eval(&x, &y, n);
                for (k, o) in out.iter().enumerate() {
                    let s: Fp = (0..n).map(|i| x[i] * y[i] * pts[i].pow(k as u64)).sum();
                    assert_eq!(*o, s);
                }
            }
        }
    }

    #[test]
    fn repeated_points_rejected() {
        assert_eq!(interpolate(&fps(&[1, 1]), &fps(&[0, 1])), Err(Error::RepeatedPoints));
    }
}
