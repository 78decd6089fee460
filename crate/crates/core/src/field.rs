//! Prime field arithmetic with a process-wide modulus.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

/// Default modulus: 119·2^23 + 1.
pub const DEFAULT_MODULUS: u32 = 998_244_353;

/// Environment variable that overrides the field modulus at first use.
pub const MODULUS_ENV: &str = "RECWIDTH_FIELD_P";

/// Modulus together with a generator of its multiplicative group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldParams {
    pub p: u32,
    pub generator: u32,
    /// Largest `k` with `2^k | p - 1`.
    pub two_adicity: u32,
    /// `⌊(2^64 - 1) / p⌋`, the Barrett multiplier.
    pub barrett: u64,
}

static PARAMS: OnceLock<FieldParams> = OnceLock::new();

impl FieldParams {
    /// Validates an NTT-friendly prime below 2^31 and finds a primitive root.
    pub fn for_prime(p: u32) -> Result<Self, String> {
        if !(3..(1u32 << 31)).contains(&p) || !is_prime(p) {
            return Err(format!("{p} is not an odd prime below 2^31"));
        }
        let two_adicity = (p - 1).trailing_zeros();
        if two_adicity < 16 {
            return Err(format!("{p} - 1 has only 2^{two_adicity} as power-of-two factor"));
        }
        let factors = prime_factors(p - 1);
        let generator = (2..p)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&q| pow_mod(g as u64, ((p - 1) / q) as u64, p as u64) != 1)
            })
            .expect("a prime field has a primitive root");
        Ok(Self { p, generator, two_adicity, barrett: u64::MAX / p as u64 })
    }
}

/// Active field parameters; reads [`MODULUS_ENV`] on first call.
pub fn params() -> &'static FieldParams {
    PARAMS.get_or_init(|| {
        let p = match std::env::var(MODULUS_ENV) {
            Ok(s) => s
                .trim()
                .parse::<u32>()
                .unwrap_or_else(|_| panic!("{MODULUS_ENV} must be an integer, got {s:?}")),
            Err(_) => DEFAULT_MODULUS,
        };
        FieldParams::for_prime(p).unwrap_or_else(|e| panic!("{MODULUS_ENV}: {e}"))
    })
}

/// The field characteristic.
#[inline]
pub fn modulus() -> u32 {
    params().p
}

/// `x mod p` for any `x`, given `m = ⌊(2^64 - 1) / p⌋`.
#[inline(always)]
pub(crate) fn barrett(x: u64, p: u64, m: u64) -> u64 {
    let q = ((x as u128).wrapping_mul(m as u128) >> 64) as u64;
    let r = x.wrapping_sub(q.wrapping_mul(p));
    if r >= p {
        r - p
    } else {
        r
    }
}

/// `x mod p` under the active parameters.
#[inline]
pub(crate) fn reduce(x: u64) -> u32 {
    let prm = params();
    barrett(x, prm.p as u64, prm.barrett) as u32
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// An element of 𝔽_p stored as its canonical residue.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u32);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    #[inline]
    pub fn new(v: u64) -> Self {
        Fp(reduce(v))
    }

    /// Wraps a value already known to be reduced.
    #[inline]
    pub(crate) fn from_raw(v: u32) -> Self {
        Fp(v)
    }

    pub fn from_i64(v: i64) -> Self {
        let p = modulus() as i64;
        Fp(v.rem_euclid(p) as u32)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let (mut b, mut r) = (self, Fp::ONE);
        while e > 0 {
            if e & 1 == 1 {
                r *= b;
            }
            b *= b;
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn try_inv(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(modulus() as u64 - 2))
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self) -> Self {
        self.try_inv().expect("inverse of zero")
    }

    /// Principal `2^k`-th root of unity.
    pub fn root_of_unity(k: u32) -> Self {
        let prm = params();
        assert!(
            k <= prm.two_adicity,
            "transform length 2^{k} exceeds the field's 2-adicity {}",
            prm.two_adicity
        );
        Fp(prm.generator).pow(((prm.p - 1) >> k) as u64)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Fp {
    fn from(v: u32) -> Self {
        Fp::new(v as u64)
    }
}

impl From<u64> for Fp {
    fn from(v: u64) -> Self {
        Fp::new(v)
    }
}

impl From<i64> for Fp {
    fn from(v: i64) -> Self {
        Fp::from_i64(v)
    }
}

impl From<i32> for Fp {
    fn from(v: i32) -> Self {
        Fp::from_i64(v as i64)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, o: Fp) -> Fp {
        let p = modulus();
        let s = self.0.wrapping_add(o.0);
        Fp(if s >= p { s.wrapping_sub(p) } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, o: Fp) -> Fp {
        if self.0 >= o.0 {
            Fp(self.0.wrapping_sub(o.0))
        } else {
            Fp(self.0.wrapping_add(modulus()).wrapping_sub(o.0))
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, o: Fp) -> Fp {
        Fp(reduce((self.0 as u64).wrapping_mul(o.0 as u64)))
    }
}

impl Div for Fp {
    type Output = Fp;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Fp) -> Fp {
        self * o.inv()
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(modulus() - self.0)
        }
    }
}

impl AddAssign for Fp {
    #[inline]
    fn add_assign(&mut self, o: Fp) {
        *self = *self + o;
    }
}

impl SubAssign for Fp {
    #[inline]
    fn sub_assign(&mut self, o: Fp) {
        *self = *self - o;
    }
}

impl MulAssign for Fp {
    #[inline]
    fn mul_assign(&mut self, o: Fp) {
        *self = *self * o;
    }
}

impl std::iter::Sum for Fp {
    fn sum<I: Iterator<Item = Fp>>(iter: I) -> Fp {
        iter.fold(Fp::ZERO, |a, b| a + b)
    }
}

impl std::iter::Product for Fp {
    fn product<I: Iterator<Item = Fp>>(iter: I) -> Fp {
        iter.fold(Fp::ONE, |a, b| a * b)
    }
}

/// Dot product of two equal-length slices.
pub fn dot(a: &[Fp], b: &[Fp]) -> Fp {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0u128;
    for (x, y) in a.iter().zip(b) {
        acc += x.0 as u128 * y.0 as u128;
    }
    Fp((acc % modulus() as u128) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters() {
        let prm = params();
        assert_eq!(prm.p, DEFAULT_MODULUS);
        assert_eq!(prm.generator, 3);
        assert_eq!(prm.two_adicity, 23);
    }

    #[test]
    fn inverse_roundtrip() {
        for v in [1u64, 2, 3, 12345, 998244352] {
            let x = Fp::new(v);
            assert_eq!(x * x.inv(), Fp::ONE);
        }
        assert!(Fp::ZERO.try_inv().is_none());
    }

    #[test]
    fn half_is_known_residue() {
        assert_eq!((-Fp::new(2).inv()).value(), 499_122_176);
    }

    #[test]
    fn roots_of_unity_have_exact_order() {
        let w = Fp::root_of_unity(10);
        assert_eq!(w.pow(1024), Fp::ONE);
        assert_ne!(w.pow(512), Fp::ONE);
    }

    #[test]
    fn rejects_unfriendly_primes() {
        assert!(FieldParams::for_prime(1_000_000_007).is_err());
        assert!(FieldParams::for_prime(998_244_351).is_err());
        let q = FieldParams::for_prime(469_762_049).unwrap();
        assert_eq!(q.generator, 3);
    }
}
