//! Dense univariate polynomials over [`Fp`] with transform-based multiplication.

use crate::error::{Error, Result};
use crate::field::{barrett, modulus, params, Fp};
use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Combined degree at which products switch from schoolbook to NTT.
pub const NTT_THRESHOLD: usize = 32;

/// Quotient/divisor sizes below which long division beats Newton iteration.
const NEWTON_DIV_THRESHOLD: usize = 64;

/// Polynomial with coefficients in increasing degree; never has trailing zeros.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    c: Vec<Fp>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { c: vec![Fp::ONE] }
    }

    pub fn constant(v: Fp) -> Self {
        Poly::from_coeffs(vec![v])
    }

    /// The indeterminate `X`.
    pub fn x() -> Self {
        Poly { c: vec![Fp::ZERO, Fp::ONE] }
    }

    /// `v · X^k`.
    pub fn monomial(v: Fp, k: usize) -> Self {
        if v.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fp::ZERO; k + 1];
        c[k] = v;
        Poly { c }
    }

    /// `X - z`.
    pub fn linear_root(z: Fp) -> Self {
        Poly { c: vec![-z, Fp::ONE] }
    }

    pub fn from_coeffs(mut c: Vec<Fp>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_slice(c: &[Fp]) -> Self {
        Poly::from_coeffs(c.to_vec())
    }

    /// Builds from signed integers, reduced into the field.
    pub fn from_i64s(c: &[i64]) -> Self {
        Poly::from_coeffs(c.iter().map(|&v| Fp::from_i64(v)).collect())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Number of stored coefficients (`degree + 1`, or 0).
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeffs(&self) -> &[Fp] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Fp> {
        self.c
    }

    /// Coefficient of `X^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Fp {
        self.c.get(i).copied().unwrap_or(Fp::ZERO)
    }

    /// Coefficients padded or cut to exactly `n` entries.
    pub fn to_vec(&self, n: usize) -> Vec<Fp> {
        let mut v = self.c.clone();
        v.resize(n, Fp::ZERO);
        v
    }

    pub fn lead(&self) -> Fp {
        self.c.last().copied().unwrap_or(Fp::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fp::ONE
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(self.lead().inv())
    }

    pub fn scale(&self, s: Fp) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly { c: self.c.iter().map(|&v| v * s).collect() }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Fp) -> Fp {
        self.c.iter().rev().fold(Fp::ZERO, |acc, &v| acc * x + v)
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &v)| v * Fp::new(i as u64))
                .collect(),
        )
    }

    /// Remainder modulo `X^n`.
    pub fn truncate(&self, n: usize) -> Poly {
        if self.c.len() <= n {
            return self.clone();
        }
        Poly::from_slice(&self.c[..n])
    }

    /// Quotient by `X^k`.
    pub fn shift_down(&self, k: usize) -> Poly {
        if self.c.len() <= k {
            return Poly::zero();
        }
        Poly { c: self.c[k..].to_vec() }
    }

    /// Product with `X^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fp::ZERO; k];
        c.extend_from_slice(&self.c);
        Poly { c }
    }

    /// Coefficients `[lo, hi)` as a polynomial starting at degree 0.
    pub fn window(&self, lo: usize, hi: usize) -> Poly {
        let hi = hi.min(self.c.len());
        if lo >= hi {
            return Poly::zero();
        }
        Poly::from_slice(&self.c[lo..hi])
    }

    /// `X^n · p(1/X)`; requires `deg p ≤ n`.
    pub fn reverse(&self, n: usize) -> Poly {
        assert!(self.c.len() <= n + 1, "reverse length below degree");
        let mut c = self.to_vec(n + 1);
        c.reverse();
        Poly::from_coeffs(c)
    }

    /// Product truncated modulo `X^n`.
    pub fn mul_trunc(&self, o: &Poly, n: usize) -> Poly {
        let a = self.truncate(n);
        let b = o.truncate(n);
        a.mul(&b).truncate(n)
    }

    /// Power series inverse modulo `X^n` by Newton iteration.
    pub fn inv_series(&self, n: usize) -> Result<Poly> {
        let c0 = self.coeff(0);
        let c0_inv = c0.try_inv().ok_or(Error::NotInvertible)?;
        if n == 0 {
            return Ok(Poly::zero());
        }
        let mut g = Poly::constant(c0_inv);
        let mut k = 1;
        while k < n {
            k = (2 * k).min(n);
            let fg = self.mul_trunc(&g, k);
            let corr = Poly::constant(Fp::new(2)) - fg;
            g = g.mul_trunc(&corr, k);
        }
        Ok(g)
    }

    /// Quotient and remainder; the divisor need not be monic.
    pub fn div_rem(&self, m: &Poly) -> Result<(Poly, Poly)> {
        let dm = m.degree().ok_or(Error::ZeroModulus)?;
        let dp = match self.degree() {
            Some(d) if d >= dm => d,
            _ => return Ok((Poly::zero(), self.clone())),
        };
        if m.c[..dm].iter().all(|v| v.is_zero()) {
            let li = m.lead().inv();
            return Ok((self.shift_down(dm).scale(li), self.truncate(dm)));
        }
        let dq = dp - dm;
        if dq < NEWTON_DIV_THRESHOLD || dm < NEWTON_DIV_THRESHOLD {
            return Ok(self.long_div(m));
        }
        let rm = m.reverse(dm);
        let inv = rm.inv_series(dq + 1)?;
        let rq = self.reverse(dp).mul_trunc(&inv, dq + 1);
        let q = rq.reverse(dq);
        let r = (self - &q.mul(m)).truncate(dm);
        Ok((q, r))
    }

    fn long_div(&self, m: &Poly) -> (Poly, Poly) {
        let dm = m.c.len() - 1;
        let li = m.lead().inv();
        let mut r = self.c.clone();
        let dq = r.len() - 1 - dm;
        let mut q = vec![Fp::ZERO; dq + 1];
        for k in (0..=dq).rev() {
            let f = r[k + dm] * li;
            q[k] = f;
            if f.is_zero() {
                continue;
            }
            for (j, &mj) in m.c.iter().enumerate() {
                r[k + j] -= f * mj;
            }
        }
        r.truncate(dm);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Remainder modulo `m`.
    pub fn rem(&self, m: &Poly) -> Result<Poly> {
        Ok(self.div_rem(m)?.1)
    }

    /// Inverse modulo `m`: Newton iteration for `X^k`, extended Euclid otherwise.
    pub fn inv_mod(&self, m: &Poly) -> Result<Poly> {
        let dm = m.degree().ok_or(Error::ZeroModulus)?;
        if dm == 0 {
            return Ok(Poly::zero());
        }
        if m.c[..dm].iter().all(|v| v.is_zero()) {
            return self.inv_series(dm);
        }
        let a = self.rem(m)?;
        let (g, s, _) = ext_gcd(&a, m);
        if g.degree() != Some(0) {
            return Err(Error::NotInvertible);
        }
        s.scale(g.lead().inv()).rem(m)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of `(X - z)` over all points, by balanced splitting.
    pub fn from_roots(points: &[Fp]) -> Poly {
        match points.len() {
            0 => Poly::one(),
            1 => Poly::linear_root(points[0]),
            n => {
                let (a, b) = points.split_at(n / 2);
                Poly::from_roots(a).mul(&Poly::from_roots(b))
            }
        }
    }

    /// Exact product.
    pub fn mul(&self, o: &Poly) -> Poly {
        Poly { c: mul_vec(&self.c, &o.c) }
    }
}

/// Returns `(g, s, t)` with `s·a + t·b = g` (g not normalized).
pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
        r0 = std::mem::replace(&mut r1, r);
        let s2 = &s0 - &q.mul(&s1);
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &q.mul(&t1);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (r0, s0, t0)
}

/// `out[n] = Σ_m a_m · seq[n + m]` for `n < len`, reading zeros past the end of `seq`.
pub fn correlate(seq: &[Fp], a: &Poly, len: usize) -> Vec<Fp> {
    if len == 0 {
        return Vec::new();
    }
    let Some(da) = a.degree() else {
        return vec![Fp::ZERO; len];
    };
    let need = (len + da).min(seq.len());
    if need == 0 {
        return vec![Fp::ZERO; len];
    }
    let mut ra = a.c.clone();
    ra.reverse();
    let prod = mul_vec(&ra, &seq[..need]);
    (0..len).map(|n| prod.get(n + da).copied().unwrap_or(Fp::ZERO)).collect()
}

/// Polynomial product of raw coefficient slices (result may carry trailing zeros only if inputs do).
pub fn mul_vec(a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 8 || n - 1 < NTT_THRESHOLD {
        return schoolbook(a, b);
    }
    let size = n.next_power_of_two();
    let mut fa: Vec<u32> = a.iter().map(|v| v.value()).collect();
    let mut fb: Vec<u32> = b.iter().map(|v| v.value()).collect();
    fa.resize(size, 0);
    fb.resize(size, 0);
    ntt(&mut fa, false);
    ntt(&mut fb, false);
    let prm = params();
    let (p, m) = (prm.p as u64, prm.barrett);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = barrett((*x as u64).wrapping_mul(*y as u64), p, m) as u32;
    }
    ntt(&mut fa, true);
    fa.truncate(n);
    fa.into_iter().map(Fp::from_raw).collect()
}

/// Forward transform of `a` zero-padded to the power of two `size`.
pub(crate) fn spectrum(a: &[Fp], size: usize) -> Vec<u32> {
    let mut f: Vec<u32> = a.iter().map(|v| v.value()).collect();
    f.resize(size, 0);
    ntt(&mut f, false);
    f
}

/// `acc += a ⊙ b` on transforms.
pub(crate) fn spectrum_mul_add(acc: &mut [u32], a: &[u32], b: &[u32]) {
    let prm = params();
    let (p, m) = (prm.p as u64, prm.barrett);
    for ((x, &u), &v) in acc.iter_mut().zip(a).zip(b) {
        let prod = barrett((u as u64).wrapping_mul(v as u64), p, m) as u32;
        let s = x.wrapping_add(prod);
        *x = if s >= prm.p { s.wrapping_sub(prm.p) } else { s };
    }
}

/// Inverse transform keeping the first `len` coefficients.
pub(crate) fn from_spectrum(mut f: Vec<u32>, len: usize) -> Poly {
    ntt(&mut f, true);
    f.truncate(len);
    Poly::from_coeffs(f.into_iter().map(Fp::from_raw).collect())
}

/// Quadratic product, also used as the reference in tests.
pub fn schoolbook(a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let prm = params();
    let p = prm.p as u64;
    let p2 = p * p;
    let lim = p2 * (u64::MAX / p2 - 1);
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        let x = x.value() as u64;
        if x == 0 {
            continue;
        }
        for (o, y) in out[i..].iter_mut().zip(b) {
            *o = o.wrapping_add(x.wrapping_mul(y.value() as u64));
            if *o >= lim {
                *o = o.wrapping_sub(lim);
            }
        }
    }
    out.into_iter().map(|v| Fp::from_raw(barrett(v, p, prm.barrett) as u32)).collect()
}

/// Roots of unity laid out so that `w[h + k] = ω_{2h}^k`, with Shoup quotients `⌊w·2^32 / p⌋`.
struct RootTable {
    w: Vec<u32>,
    shoup: Vec<u32>,
}

thread_local! {
    static ROOTS: RefCell<RootTable> = const { RefCell::new(RootTable { w: Vec::new(), shoup: Vec::new() }) };
}

fn ensure_roots(table: &mut RootTable, n: usize) {
    if table.w.len() >= n {
        return;
    }
    let p = modulus() as u64;
    let mut w = vec![0u32; n];
    let mut h = 1;
    while h < n {
        let root = Fp::root_of_unity((2 * h).trailing_zeros());
        let mut cur = Fp::ONE;
        for k in 0..h {
            w[h + k] = cur.value();
            cur *= root;
        }
        h <<= 1;
    }
    table.shoup = w.iter().map(|&x| (((x as u64) << 32) / p) as u32).collect();
    table.w = w;
}

/// In-place radix-2 number-theoretic transform; `a.len()` must be a power of two.
pub fn ntt(a: &mut [u32], invert: bool) {
    let n = a.len();
    assert!(n.is_power_of_two());
    if n == 1 {
        return;
    }
    let p = modulus();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    ROOTS.with(|cell| {
        let mut table = cell.borrow_mut();
        ensure_roots(&mut table, n);
        let mut h = 1;
        while h < n {
            let w = &table.w[h..2 * h];
            let ws = &table.shoup[h..2 * h];
            for chunk in a.chunks_exact_mut(2 * h) {
                let (lo, hi) = chunk.split_at_mut(h);
                for k in 0..h {
                    let q = ((hi[k] as u64).wrapping_mul(ws[k] as u64) >> 32) as u32;
                    let mut v = hi[k].wrapping_mul(w[k]).wrapping_sub(q.wrapping_mul(p));
                    if v >= p {
                        v = v.wrapping_sub(p);
                    }
                    let u = lo[k];
                    let s = u.wrapping_add(v);
                    lo[k] = if s >= p { s.wrapping_sub(p) } else { s };
                    hi[k] = if u >= v { u.wrapping_sub(v) } else { u.wrapping_add(p).wrapping_sub(v) };
                }
            }
            h <<= 1;
        }
    });
    if invert {
        a[1..].reverse();
        let prm = params();
        let ni = Fp::new(n as u64).inv().value() as u64;
        for x in a.iter_mut() {
            *x = barrett(*x as u64 * ni, prm.p as u64, prm.barrett) as u32;
        }
    }
}

fn add_vec(a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, &v) in out.iter_mut().zip(short) {
        *o += v;
    }
    out
}

fn sub_vec(a: &[Fp], b: &[Fp]) -> Vec<Fp> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), Fp::ZERO);
    }
    for (o, &v) in out.iter_mut().zip(b) {
        *o -= v;
    }
    out
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        Poly::from_coeffs(add_vec(&self.c, &o.c))
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        Poly::from_coeffs(sub_vec(&self.c, &o.c))
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        Poly::mul(self, o)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { c: self.c.iter().map(|&v| -v).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, o: &Poly) {
        if self.c.len() < o.c.len() {
            self.c.resize(o.c.len(), Fp::ZERO);
        }
        for (a, &b) in self.c.iter_mut().zip(&o.c) {
            *a += b;
        }
        while self.c.last().is_some_and(|v| v.is_zero()) {
            self.c.pop();
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, o: &Poly) {
        if self.c.len() < o.c.len() {
            self.c.resize(o.c.len(), Fp::ZERO);
        }
        for (a, &b) in self.c.iter_mut().zip(&o.c) {
            *a -= b;
        }
        while self.c.last().is_some_and(|v| v.is_zero()) {
            self.c.pop();
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.c)
    }
}

/// Exact product of two polynomials.
pub fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    p.mul(q)
}

/// Remainder of `p` modulo `m`.
pub fn poly_rem(p: &Poly, m: &Poly) -> Result<Poly> {
    p.rem(m)
}

/// Inverse of `p` modulo `m`.
pub fn poly_inv_mod(p: &Poly, m: &Poly) -> Result<Poly> {
    p.inv_mod(m)
}
