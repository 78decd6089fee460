//! Shared inputs for the criterion benchmarks.

use recwidth::fixtures::{random_spec, RKind, SpecShape};
use recwidth::rng::SplitMix64;
use recwidth::{build_dyadic_tree, DyadicTree, Fp, RecurrenceSpec};

/// Sizes swept by every benchmark group.
pub const SIZES: [usize; 4] = [1 << 10, 1 << 12, 1 << 14, 1 << 16];

/// A square width-`t` spec of the given kind, its tree and a random input vector.
pub fn square_instance(kind: RKind, n: usize, t: usize, seed: u64) -> (RecurrenceSpec, DyadicTree, Vec<Fp>) {
    let mut rng = SplitMix64::new(seed);
    let spec = random_spec(&mut rng, kind, SpecShape { rows: n, n, t, r: 1, degree: (1, 0) });
    let tree = build_dyadic_tree(&spec).expect("random specs are well formed");
    let v = rng.fp_vec(n);
    (spec, tree, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_shapes() {
        let (spec, _, v) = square_instance(RKind::Shift, 64, 2, 0);
        assert_eq!((spec.rows(), spec.cols(), v.len()), (64, 64, 64));
    }
}
