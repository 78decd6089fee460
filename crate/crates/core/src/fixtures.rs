//! Classical and seeded random instances shared by tests, benches and the CLI.

use crate::dense::DenseMatrix;
use crate::field::Fp;
use crate::poly::Poly;
use crate::quasi::QuasiSep;
use crate::recurrence::{BandMatrix, RDescriptor, RecurrenceSpec};
use crate::rng::SplitMix64;

/// Chebyshev polynomials `T_0 = 1`, `T_1 = X`, `T_i = 2X·T_{i-1} - T_{i-2}` as an `n`-row spec over `r`.
///
/// The error term seeds row 0 with the first generator row, which is `e_0`.
pub fn chebyshev_spec(n: usize, r: RDescriptor) -> RecurrenceSpec {
    let cols = r.size();
    let g = (0..n)
        .map(|i| match i {
            0 => vec![Poly::one()],
            1 => vec![Poly::one(), Poly::x()],
            _ => vec![Poly::one(), Poly::from_i64s(&[0, 2]), Poly::from_i64s(&[-1])],
        })
        .collect();
    let mut c = DenseMatrix::zeros(n, 1);
    if n > 0 {
        c[(0, 0)] = Fp::ONE;
    }
    let mut d = DenseMatrix::zeros(1, cols);
    if cols > 0 {
        d[(0, 0)] = Fp::ONE;
    }
    RecurrenceSpec::new(2, (1, 0), g, c, d, r).expect("Chebyshev spec is well formed")
}

/// Operator families exercised by the randomized checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RKind {
    Shift,
    Companion,
    Diagonal,
    BandLower,
    BandUpper,
    Quasi,
}

impl RKind {
    pub const ALL: [RKind; 6] =
        [RKind::Shift, RKind::Companion, RKind::Diagonal, RKind::BandLower, RKind::BandUpper, RKind::Quasi];

    pub fn name(self) -> &'static str {
        match self {
            RKind::Shift => "shift",
            RKind::Companion => "companion",
            RKind::Diagonal => "diagonal",
            RKind::BandLower => "band-lower",
            RKind::BandUpper => "band-upper",
            RKind::Quasi => "quasi",
        }
    }
}

/// Dense diagonal plus strictly lower and upper parts of rank at most `t`, in recursive form.
pub fn random_quasi(rng: &mut SplitMix64, n: usize, t: usize) -> QuasiSep {
    let t = t.max(1);
    let lo_u = DenseMatrix::from_fn(n, t, |_, _| rng.fp());
    let lo_v = DenseMatrix::from_fn(n, t, |_, _| rng.fp());
    let up_u = DenseMatrix::from_fn(n, t, |_, _| rng.fp());
    let up_v = DenseMatrix::from_fn(n, t, |_, _| rng.fp());
    let diag = rng.fp_vec(n);
    let lower = lo_u.mul(&lo_v.transpose());
    let upper = up_u.mul(&up_v.transpose());
    let m = DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => lower[(i, j)],
        std::cmp::Ordering::Less => upper[(i, j)],
        std::cmp::Ordering::Equal => diag[i],
    });
    QuasiSep::from_dense(&m, t).expect("semiseparable parts have rank at most t")
}

/// Random monic polynomial of degree `n`.
pub fn random_monic(rng: &mut SplitMix64, n: usize) -> Poly {
    let mut c = rng.fp_vec(n);
    c.push(Fp::ONE);
    Poly::from_coeffs(c)
}

/// Random band matrix with `delta` off-diagonals.
pub fn random_band(rng: &mut SplitMix64, n: usize, delta: usize, lower: bool) -> BandMatrix {
    BandMatrix::new(n, delta, lower, |_, _| rng.fp())
}

/// Random operator of the given kind; `t` sets the band width or quasiseparable order.
pub fn random_descriptor(rng: &mut SplitMix64, kind: RKind, n: usize, t: usize) -> RDescriptor {
    match kind {
        RKind::Shift => RDescriptor::Shift(n),
        RKind::Companion => RDescriptor::Companion(random_monic(rng, n)),
        RKind::Diagonal => RDescriptor::Diagonal(rng.distinct_fp_vec(n)),
        RKind::BandLower => RDescriptor::Band(random_band(rng, n, t, true)),
        RKind::BandUpper => RDescriptor::Band(random_band(rng, n, t, false)),
        RKind::Quasi => RDescriptor::Quasi(random_quasi(rng, n, t)),
    }
}

/// Dimensions of a random spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpecShape {
    pub rows: usize,
    pub n: usize,
    pub t: usize,
    pub r: usize,
    pub degree: (usize, usize),
}

fn random_poly(rng: &mut SplitMix64, max_degree: usize) -> Poly {
    Poly::from_coeffs(rng.fp_vec(max_degree + 1))
}

/// Random spec with full-degree coefficients and a dense rank-`r` error.
pub fn random_spec(rng: &mut SplitMix64, kind: RKind, shape: SpecShape) -> RecurrenceSpec {
    let SpecShape { rows, n, t, r, degree: (d, dbar) } = shape;
    let r_desc = random_descriptor(rng, kind, n, t.clamp(1, 2));
    loop {
        let g = (0..rows)
            .map(|i| {
                let mut lead = random_poly(rng, dbar).into_coeffs();
                lead.resize(dbar + 1, Fp::ZERO);
                lead[0] = rng.nonzero_fp();
                let mut row = vec![Poly::from_coeffs(lead)];
                for j in 1..=t.min(i) {
                    row.push(random_poly(rng, d * j + dbar));
                }
                row
            })
            .collect();
        let c = DenseMatrix::from_fn(rows, r, |_, _| rng.fp());
        let dm = DenseMatrix::from_fn(r, n, |_, _| rng.fp());
        if let Ok(spec) = RecurrenceSpec::new(t, (d, dbar), g, c, dm, r_desc.clone()) {
            return spec;
        }
    }
}

/// Square width-`t` spec over `X^n` with unit leading coefficients and errors only in the first `t` rows.
///
/// Row `i` has degree exactly `i` with overwhelming probability, so the matrix is triangular.
pub fn random_basic_spec(rng: &mut SplitMix64, n: usize, t: usize) -> RecurrenceSpec {
    let g = (0..n)
        .map(|i| {
            let mut row = vec![Poly::one()];
            for j in 1..=t.min(i) {
                row.push(random_poly(rng, j));
            }
            row
        })
        .collect();
    let heads = t.min(n).max(1);
    let mut c = DenseMatrix::zeros(n, heads);
    for i in 0..t.min(n) {
        c[(i, i)] = Fp::ONE;
    }
    let d = DenseMatrix::from_fn(heads, n, |k, j| match j.cmp(&k) {
        std::cmp::Ordering::Less => rng.fp(),
        std::cmp::Ordering::Equal => rng.nonzero_fp(),
        std::cmp::Ordering::Greater => Fp::ZERO,
    });
    RecurrenceSpec::new(t, (1, 0), g, c, d, RDescriptor::Shift(n)).expect("basic spec is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quasi_fixture_has_requested_order() {
        let mut rng = SplitMix64::new(3);
        let q = random_quasi(&mut rng, 16, 2);
        assert_eq!(q.size(), 16);
        assert!(q.order() <= 2);
    }

    #[test]
    fn descriptors_have_requested_size() {
        let mut rng = SplitMix64::new(5);
        for kind in RKind::ALL {
            assert_eq!(random_descriptor(&mut rng, kind, 9, 2).size(), 9, "{}", kind.name());
        }
    }
}
