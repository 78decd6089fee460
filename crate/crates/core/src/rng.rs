//! Seeded splitmix64 stream shared by tests, the CLI and benchmarks.
//!
//! Constants: increment `0x9E37_79B9_7F4A_7C15`, mixers `0xBF58_476D_1CE4_E5B9`
//! and `0x94D0_49BB_1331_11EB` with shifts 30, 27, 31. Field elements are drawn
//! as `next_u64() % p`.

use crate::field::{modulus, Fp};

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn fp(&mut self) -> Fp {
        Fp::new(self.next_u64() % modulus() as u64)
    }

    pub fn nonzero_fp(&mut self) -> Fp {
        loop {
            let v = self.fp();
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn fp_vec(&mut self, n: usize) -> Vec<Fp> {
        (0..n).map(|_| self.fp()).collect()
    }

    /// Vector of distinct field elements.
    pub fn distinct_fp_vec(&mut self, n: usize) -> Vec<Fp> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let v = self.fp();
            if seen.insert(v) {
                out.push(v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_stream() {
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }
}
