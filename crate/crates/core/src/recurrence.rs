//! Recurrence parameterizations, transition matrices and the dyadic product tree.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::evaltree::EvalTree;
use crate::field::Fp;
use crate::krylov::{char_poly, KrylovOperator};
use crate::poly::{spectrum, Poly};
use crate::polymat::PolyMat;
use crate::quasi::QuasiSep;

/// Triangular band matrix stored by diagonals.
///
/// `diags[k][i]` is `M[i+k][i]` when lower and `M[i][i+k]` when upper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandMatrix {
    n: usize,
    lower: bool,
    diags: Vec<Vec<Fp>>,
}

impl BandMatrix {
    /// Builds from an entry function evaluated only inside the band.
    pub fn new(n: usize, delta: usize, lower: bool, mut f: impl FnMut(usize, usize) -> Fp) -> Self {
        let diags = (0..=delta.min(n.saturating_sub(1)))
            .map(|k| {
                (0..n - k)
                    .map(|i| if lower { f(i + k, i) } else { f(i, i + k) })
                    .collect()
            })
            .collect();
        BandMatrix { n, lower, diags }
    }

    /// Reads the band out of a dense matrix, refusing entries outside it.
    pub fn from_dense(m: &DenseMatrix, delta: usize, lower: bool) -> Result<Self> {
        let n = m.rows();
        for i in 0..n {
            for j in 0..n {
                let inside = if lower { i >= j && i - j <= delta } else { j >= i && j - i <= delta };
                if !inside && !m[(i, j)].is_zero() {
                    return Err(Error::InvalidSpec(format!("entry ({i},{j}) outside the band")));
                }
            }
        }
        Ok(BandMatrix::new(n, delta, lower, |i, j| m[(i, j)]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of off-diagonals.
    pub fn delta(&self) -> usize {
        self.diags.len().saturating_sub(1)
    }

    pub fn is_lower(&self) -> bool {
        self.lower
    }

    pub fn get(&self, i: usize, j: usize) -> Fp {
        let (k, idx) = if self.lower {
            if i < j {
                return Fp::ZERO;
            }
            (i - j, j)
        } else {
            if j < i {
                return Fp::ZERO;
            }
            (j - i, i)
        };
        self.diags.get(k).map_or(Fp::ZERO, |d| d[idx])
    }

    pub fn diagonal(&self) -> &[Fp] {
        &self.diags[0]
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn transpose(&self) -> BandMatrix {
        BandMatrix { n: self.n, lower: !self.lower, diags: self.diags.clone() }
    }

    /// `P·M·P` for the reversal permutation `P`; flips orientation.
    pub fn reversed(&self) -> BandMatrix {
        let diags = self.diags.iter().map(|d| d.iter().rev().copied().collect()).collect();
        BandMatrix { n: self.n, lower: !self.lower, diags }
    }

    pub fn matvec(&self, v: &[Fp]) -> Vec<Fp> {
        let mut out = vec![Fp::ZERO; self.n];
        for (k, d) in self.diags.iter().enumerate() {
            for (i, &x) in d.iter().enumerate() {
                if self.lower {
                    out[i + k] += x * v[i];
                } else {
                    out[i] += x * v[i + k];
                }
            }
        }
        out
    }
}

/// The operator `R` a recurrence is taken over.
#[derive(Clone, Debug)]
pub enum RDescriptor {
    /// Multiplication by `X` modulo a monic polynomial of degree `N`.
    Companion(Poly),
    /// Multiplication by `X` modulo `X^N`.
    Shift(usize),
    Diagonal(Vec<Fp>),
    Band(BandMatrix),
    Quasi(QuasiSep),
}

impl RDescriptor {
    /// Companion operator of a monic modulus.
    pub fn companion(modulus: Poly) -> Result<Self> {
        match modulus.degree() {
            Some(d) if d > 0 && modulus.is_monic() => Ok(RDescriptor::Companion(modulus)),
            _ => Err(Error::InvalidSpec("companion modulus must be monic of positive degree".into())),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            RDescriptor::Companion(m) => m.degree().unwrap_or(0),
            RDescriptor::Shift(n) => *n,
            RDescriptor::Diagonal(z) => z.len(),
            RDescriptor::Band(b) => b.n(),
            RDescriptor::Quasi(q) => q.size(),
        }
    }

    /// Modulus when the descriptor acts on polynomials directly.
    pub fn modulus_poly(&self) -> Option<Poly> {
        match self {
            RDescriptor::Companion(m) => Some(m.clone()),
            RDescriptor::Shift(n) => Some(Poly::monomial(Fp::ONE, *n)),
            _ => None,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            RDescriptor::Companion(m) => companion_dense(m),
            RDescriptor::Shift(n) => companion_dense(&Poly::monomial(Fp::ONE, *n)),
            RDescriptor::Diagonal(z) => DenseMatrix::diag(z),
            RDescriptor::Band(b) => b.to_dense(),
            RDescriptor::Quasi(q) => q.to_dense(),
        }
    }

    pub fn matvec(&self, v: &[Fp]) -> Vec<Fp> {
        assert_eq!(v.len(), self.size());
        match self {
            RDescriptor::Companion(_) | RDescriptor::Shift(_) => {
                let m = self.modulus_poly().unwrap();
                let n = v.len();
                let mut out = vec![Fp::ZERO; n];
                if n == 0 {
                    return out;
                }
                out[1..].copy_from_slice(&v[..n - 1]);
                let top = v[n - 1];
                for (o, c) in out.iter_mut().zip(m.coeffs()) {
                    *o -= top * *c;
                }
                out
            }
            RDescriptor::Diagonal(z) => z.iter().zip(v).map(|(&a, &b)| a * b).collect(),
            RDescriptor::Band(b) => b.matvec(v),
            RDescriptor::Quasi(q) => q.matvec(v),
        }
    }

    /// Descriptor of `Rᵀ`; companion operators become 1-quasiseparable.
    pub fn transpose(&self) -> Result<RDescriptor> {
        Ok(match self {
            RDescriptor::Companion(_) => {
                RDescriptor::Quasi(QuasiSep::from_dense(&self.to_dense().transpose(), 1)?)
            }
            RDescriptor::Shift(n) => {
                RDescriptor::Band(BandMatrix::new(*n, 1, false, |i, j| if i == j { Fp::ZERO } else { Fp::ONE }))
            }
            RDescriptor::Diagonal(z) => RDescriptor::Diagonal(z.clone()),
            RDescriptor::Band(b) => RDescriptor::Band(b.transpose()),
            RDescriptor::Quasi(q) => RDescriptor::Quasi(q.transpose()),
        })
    }

    /// Monic characteristic polynomial.
    pub fn char_poly(&self) -> Result<Poly> {
        char_poly(self)
    }

    /// Diagonal entries when the operator is triangular.
    pub fn triangular_diagonal(&self) -> Option<Vec<Fp>> {
        match self {
            RDescriptor::Shift(n) => Some(vec![Fp::ZERO; *n]),
            RDescriptor::Diagonal(z) => Some(z.clone()),
            RDescriptor::Band(b) => Some(b.diagonal().to_vec()),
            _ => None,
        }
    }
}

/// Dense matrix of multiplication by `X` modulo a monic `m`.
pub fn companion_dense(m: &Poly) -> DenseMatrix {
    let n = m.degree().unwrap_or(0);
    let mut r = DenseMatrix::zeros(n, n);
    for i in 1..n {
        r[(i, i - 1)] = Fp::ONE;
    }
    for i in 0..n {
        r[(i, n - 1)] = -m.coeff(i);
    }
    r
}

/// Rows `a_i` with `g_{i,0}(R)·a_i = Σ_{j≥1} g_{i,j}(R)·a_{i-j} + Σ_k C[i,k]·d_k`.
#[derive(Clone, Debug)]
pub struct RecurrenceSpec {
    rows: usize,
    n: usize,
    t: usize,
    degree: (usize, usize),
    g: Vec<Vec<Poly>>,
    c: DenseMatrix,
    d: DenseMatrix,
    r_desc: RDescriptor,
}

impl RecurrenceSpec {
    /// Validates shapes, degree bounds and invertibility of the leading coefficients.
    ///
    /// `g[i]` lists `g_{i,0}, …, g_{i,min(t,i)}`; missing trailing entries are zero.
    pub fn new(
        t: usize,
        degree: (usize, usize),
        g: Vec<Vec<Poly>>,
        c: DenseMatrix,
        d: DenseMatrix,
        r_desc: RDescriptor,
    ) -> Result<Self> {
        let rows = g.len();
        let n = r_desc.size();
        if c.rows() != rows || c.cols() != d.rows() || d.cols() != n {
            return Err(Error::Dimension(format!(
                "C is {}x{}, D is {}x{}, expected {rows}xr and rx{n}",
                c.rows(),
                c.cols(),
                d.rows(),
                d.cols()
            )));
        }
        let mut gn = Vec::with_capacity(rows);
        for (i, mut row) in g.into_iter().enumerate() {
            let width = t.min(i);
            if row.is_empty() {
                return Err(Error::InvalidSpec(format!("row {i} lacks a leading coefficient")));
            }
            if row.len() > width + 1 {
                if row[width + 1..].iter().any(|p| !p.is_zero()) {
                    return Err(Error::InvalidSpec(format!("row {i} has more than {width} terms")));
                }
                row.truncate(width + 1);
            }
            row.resize(width + 1, Poly::zero());
            for (j, p) in row.iter().enumerate() {
                let bound = degree.0 * j + degree.1;
                if p.degree().is_some_and(|dg| dg > bound) {
                    return Err(Error::InvalidSpec(format!("deg g[{i}][{j}] exceeds {bound}")));
                }
            }
            if row[0].is_zero() {
                return Err(Error::SharedRoots);
            }
            gn.push(row);
        }
        let spec = RecurrenceSpec { rows, n, t, degree, g: gn, c, d, r_desc };
        spec.check_leading()?;
        Ok(spec)
    }

    fn check_leading(&self) -> Result<()> {
        if self.g.iter().all(|row| row[0].degree() == Some(0)) {
            return Ok(());
        }
        let lead = leading_product(&self.g);
        match &self.r_desc {
            RDescriptor::Shift(_) => {
                if self.g.iter().any(|row| row[0].coeff(0).is_zero()) {
                    return Err(Error::SharedRoots);
                }
            }
            RDescriptor::Diagonal(_) | RDescriptor::Band(_) => {
                let pts = self.r_desc.triangular_diagonal().unwrap();
                if EvalTree::new(&pts).multipoint_eval(&lead).iter().any(|v| v.is_zero()) {
                    return Err(Error::SharedRoots);
                }
            }
            RDescriptor::Companion(_) | RDescriptor::Quasi(_) => {
                let m = self.r_desc.char_poly()?;
                if lead.rem(&m)?.gcd(&m).degree() != Some(0) {
                    return Err(Error::SharedRoots);
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Length of each row (size of `R`).
    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.t
    }

    pub fn rank(&self) -> usize {
        self.c.cols()
    }

    pub fn degree(&self) -> (usize, usize) {
        self.degree
    }

    /// `g_{i,j}`, zero outside the stored range.
    pub fn g(&self, i: usize, j: usize) -> Poly {
        self.g.get(i).and_then(|row| row.get(j)).cloned().unwrap_or_else(|| {
            if j == 0 {
                Poly::one()
            } else {
                Poly::zero()
            }
        })
    }

    pub fn g_row(&self, i: usize) -> &[Poly] {
        &self.g[i]
    }

    pub fn c(&self) -> &DenseMatrix {
        &self.c
    }

    /// Generator matrix whose rows are the `d_k`.
    pub fn d(&self) -> &DenseMatrix {
        &self.d
    }

    pub fn r_desc(&self) -> &RDescriptor {
        &self.r_desc
    }

    /// Coefficients `g'_{i,m} = g_{i,m}·∏_{k=i-m+1}^{i-1} g_{k,0}`, `m = 1..=t`.
    pub fn scaled_row(&self, i: usize, trunc: Option<usize>) -> Vec<Poly> {
        let t = self.t.max(1);
        let mut out = vec![Poly::zero(); t];
        if i >= self.rows {
            return out;
        }
        let mut prod = Poly::one();
        for m in 1..=self.t.min(i) {
            if m > 1 {
                prod = mul_opt(&prod, &self.g[i - m + 1][0], trunc);
            }
            let gim = &self.g[i][m];
            if !gim.is_zero() {
                out[m - 1] = mul_opt(gim, &prod, trunc);
            }
        }
        out
    }
}

fn mul_opt(a: &Poly, b: &Poly, trunc: Option<usize>) -> Poly {
    match trunc {
        Some(n) => a.mul_trunc(b, n),
        None => a.mul(b),
    }
}

fn leading_product(g: &[Vec<Poly>]) -> Poly {
    fn go(g: &[Vec<Poly>]) -> Poly {
        match g.len() {
            0 => Poly::one(),
            1 => g[0][0].clone(),
            n => go(&g[..n / 2]).mul(&go(&g[n / 2..])),
        }
    }
    go(g)
}

/// Companion-shaped `t×t` step from rows `i-t+1..=i` to `i-t+2..=i+1`, built from row `i+1`.
pub fn transition(spec: &RecurrenceSpec, i: usize) -> PolyMat {
    transition_trunc(spec, i, None)
}

fn transition_trunc(spec: &RecurrenceSpec, i: usize, trunc: Option<usize>) -> PolyMat {
    let t = spec.width().max(1);
    let scaled = spec.scaled_row(i + 1, trunc);
    let mut m = PolyMat::zeros(t, t);
    for s in 0..t - 1 {
        m[(s, s + 1)] = Poly::one();
    }
    for (k, p) in scaled.into_iter().enumerate() {
        m[(t - 1, t - 1 - k)] = p;
    }
    m
}

/// Data stored for one dyadic interval `[ℓ, r)`.
#[derive(Clone, Debug)]
pub struct TreeNode {
    /// `T_[ℓ:r] = T_{r-1}···T_ℓ`.
    pub trans: PolyMat,
    /// `S_[ℓ:r] = ∏_{k=ℓ}^{r-1} g_{k,0}`.
    pub suffix: Poly,
    /// `Σ_j S_[ℓ:j]·T_[j:r]·e·C[j,·]`, `t×r`.
    pub q: PolyMat,
    /// Degree bounds of the query-time accumulators over this interval.
    pub(crate) deg_h: usize,
    pub(crate) deg_p: usize,
    /// Transforms of `trans` and `q` sized for products with the right sibling's `P`.
    pub(crate) spectra: Option<Spectra>,
}

/// Precomputed transforms of a left child's entries, `None` for zero entries.
#[derive(Clone, Debug)]
pub(crate) struct Spectra {
    pub size: usize,
    pub trans: Vec<Option<Vec<u32>>>,
    pub q: Vec<Option<Vec<u32>>>,
}

/// Intervals of at most `2^FOLD_LEVEL` rows are folded leaf by leaf at query time.
pub(crate) const FOLD_LEVEL: usize = 4;

/// Smallest transform worth caching.
const SPECTRUM_MIN: usize = 64;

fn node_spectra(left: &TreeNode, right: &TreeNode) -> Option<Spectra> {
    let dm = left.trans.max_degree().max(left.q.max_degree())?;
    let size = (right.deg_p + dm + 1).next_power_of_two();
    if size < SPECTRUM_MIN {
        return None;
    }
    let of = |m: &PolyMat| -> Vec<Option<Vec<u32>>> {
        (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .map(|(i, j)| (!m[(i, j)].is_zero()).then(|| spectrum(m[(i, j)].coeffs(), size)))
            .collect()
    };
    Some(Spectra { size, trans: of(&left.trans), q: of(&left.q) })
}

/// Precomputed ranged transitions over all dyadic intervals, plus per-query constants.
#[derive(Clone, Debug)]
pub struct DyadicTree {
    size: usize,
    t: usize,
    trunc: Option<usize>,
    levels: Vec<Vec<TreeNode>>,
    modulus: Poly,
    leading_inv: Poly,
    pub(crate) krylov: Vec<KrylovOperator>,
}

impl DyadicTree {
    /// Padded row count (a power of two).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn width(&self) -> usize {
        self.t
    }

    /// `levels()[k][b]` covers `[b·2^k, (b+1)·2^k)`.
    pub fn levels(&self) -> &[Vec<TreeNode>] {
        &self.levels
    }

    pub fn node(&self, level: usize, index: usize) -> &TreeNode {
        &self.levels[level][index]
    }

    pub fn root(&self) -> &TreeNode {
        &self.levels.last().unwrap()[0]
    }

    /// Characteristic polynomial of `R` the products are reduced by.
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// `S_[0:M]^{-1} mod c_R`.
    pub fn leading_inv(&self) -> &Poly {
        &self.leading_inv
    }

    /// Truncation length when the modulus is `X^N`.
    pub fn truncation(&self) -> Option<usize> {
        self.trunc
    }
}

/// Builds every dyadic `T_[ℓ:r]`, `S_[ℓ:r]` and `Q_[ℓ:r]`, bottom-up.
pub fn build_dyadic_tree(spec: &RecurrenceSpec) -> Result<DyadicTree> {
    let t = spec.width().max(1);
    let r = spec.rank();
    let size = spec.rows().max(1).next_power_of_two();
    let n = spec.cols();
    let trunc = match spec.r_desc() {
        RDescriptor::Shift(n) => Some(*n),
        _ => None,
    };
    let cap = |d: usize| trunc.map_or(d, |n| d.min(n.saturating_sub(1)));
    let mut leaves = Vec::with_capacity(size);
    for j in 0..size {
        let trans = transition_trunc(spec, j, trunc);
        let suffix = if j < spec.rows() { spec.g(j, 0) } else { Poly::one() };
        let suffix = match trunc {
            Some(n) => suffix.truncate(n),
            None => suffix,
        };
        let q = PolyMat::from_fn(t, r, |s, k| {
            if j < spec.rows() {
                trans[(s, t - 1)].scale(spec.c()[(j, k)])
            } else {
                Poly::zero()
            }
        });
        leaves.push(TreeNode { trans, suffix, q, deg_h: 0, deg_p: 0, spectra: None });
    }
    let mut levels = vec![leaves];
    while levels.last().unwrap().len() > 1 {
        let prev = levels.last().unwrap();
        let next = prev
            .chunks(2)
            .map(|pair| {
                let (lt, rt) = (&pair[0], &pair[1]);
                let trans = rt.trans.mul_trunc(&lt.trans, trunc);
                let suffix = mul_opt(&lt.suffix, &rt.suffix, trunc);
                let q = rt.trans.mul_trunc(&lt.q, trunc).add(&rt.q.scale_poly(&lt.suffix, trunc));
                let ds = |p: &Poly| p.degree().unwrap_or(0);
                let dm = |m: &PolyMat| m.max_degree().unwrap_or(0);
                let deg_h = cap(
                    (ds(&rt.suffix) + lt.deg_h)
                        .max(ds(&lt.suffix) + rt.deg_h)
                        .max(rt.deg_p + dm(&lt.q)),
                );
                let deg_p = cap((ds(&rt.suffix) + lt.deg_p).max(rt.deg_p + dm(&lt.trans)));
                TreeNode { trans, suffix, q, deg_h, deg_p, spectra: None }
            })
            .collect();
        levels.push(next);
    }
    for nodes in levels.iter_mut().skip(FOLD_LEVEL) {
        for pair in nodes.chunks_mut(2) {
            if let [left, right] = pair {
                left.spectra = node_spectra(left, right);
            }
        }
    }
    let modulus = match spec.r_desc().modulus_poly() {
        Some(m) => m,
        None => spec.r_desc().char_poly()?,
    };
    let lead = &levels.last().unwrap()[0].suffix;
    let leading_inv = if n == 0 {
        Poly::zero()
    } else {
        lead.inv_mod(&modulus).map_err(|e| match e {
            Error::NotInvertible => Error::SharedRoots,
            other => other,
        })?
    };
    let krylov = (0..r)
        .map(|k| KrylovOperator::new(spec.r_desc(), spec.d().row(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DyadicTree { size, t, trunc, levels, modulus, leading_inv, krylov })
}

/// Entry `(i, j)` of `G^{-1}` reduced modulo `c_R`, by direct sequential products.
pub fn structure_entry(spec: &RecurrenceSpec, tree: &DyadicTree, i: usize, j: usize) -> Result<Poly> {
    if j > i {
        return Ok(Poly::zero());
    }
    let t = spec.width().max(1);
    let m = tree.modulus();
    let mut state = PolyMat::zeros(t, 1);
    state[(t - 1, 0)] = Poly::one();
    for k in j..i {
        state = transition(spec, k).mul(&state);
        for s in 0..t {
            state[(s, 0)] = state[(s, 0)].rem(m)?;
        }
    }
    let mut den = Poly::one();
    for k in j..=i {
        den = den.mul(&spec.g(k, 0)).rem(m)?;
    }
    let inv = den.inv_mod(m).map_err(|_| Error::SharedRoots)?;
    state[(t - 1, 0)].mul(&inv).rem(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::chebyshev_spec;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64s(c)
    }

    #[test]
    fn chebyshev_transitions() {
        let spec = chebyshev_spec(8, RDescriptor::Shift(8));
        let t = transition(&spec, 1);
        assert_eq!(t[(0, 0)], Poly::zero());
        assert_eq!(t[(0, 1)], Poly::one());
        assert_eq!(t[(1, 0)], p(&[-1]));
        assert_eq!(t[(1, 1)], p(&[0, 2]));
        let first = transition(&spec, 0);
        assert_eq!(first[(1, 0)], Poly::zero());
        assert_eq!(first[(1, 1)], p(&[0, 1]));
    }

    #[test]
    fn single_term_transition() {
        let g = vec![vec![Poly::one()], vec![Poly::one(), Poly::x()]];
        let spec = RecurrenceSpec::new(
            1,
            (1, 0),
            g,
            DenseMatrix::from_i64_rows(&[&[1], &[0]]),
            DenseMatrix::from_i64_rows(&[&[1, 0]]),
            RDescriptor::Shift(2),
        )
        .unwrap();
        let t = transition(&spec, 0);
        assert_eq!((t.rows(), t.cols()), (1, 1));
        assert_eq!(t[(0, 0)], Poly::x());
    }

    #[test]
    fn chebyshev_tree_products() {
        let spec = chebyshev_spec(8, RDescriptor::Shift(8));
        let tree = build_dyadic_tree(&spec).unwrap();
        let t02 = &tree.node(1, 0).trans;
        assert_eq!(t02[(1, 1)], p(&[-1, 0, 2]));
        let generic = transition(&spec, 2).mul(&transition(&spec, 1));
        assert_eq!(generic[(0, 0)], p(&[-1]));
        assert_eq!(generic[(0, 1)], p(&[0, 2]));
        assert_eq!(generic[(1, 0)], p(&[0, -2]));
        assert_eq!(generic[(1, 1)], p(&[-1, 0, 4]));
        for j in 0..8 {
            assert_eq!(tree.node(0, j).trans, transition(&spec, j));
        }
    }

    #[test]
    fn chebyshev_structure_entries() {
        let spec = chebyshev_spec(4, RDescriptor::Shift(4));
        let tree = build_dyadic_tree(&spec).unwrap();
        assert_eq!(structure_entry(&spec, &tree, 2, 0).unwrap(), p(&[-1, 0, 2]));
        for i in 0..4 {
            assert_eq!(structure_entry(&spec, &tree, i, i).unwrap(), Poly::one());
            for j in i + 1..4 {
                assert!(structure_entry(&spec, &tree, i, j).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn band_reversal_and_transpose() {
        let b = BandMatrix::new(4, 1, true, |i, j| Fp::new((10 * i + j + 1) as u64));
        let d = b.to_dense();
        let rev = b.reversed().to_dense();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(rev[(i, j)], d[(3 - i, 3 - j)]);
            }
        }
        assert_eq!(b.transpose().to_dense(), d.transpose());
        let v: Vec<Fp> = (1..=4).map(Fp::new).collect();
        assert_eq!(b.matvec(&v), d.matvec(&v));
    }

    #[test]
    fn companion_matvec_is_multiplication_by_x() {
        let m = p(&[3, 1, 4, 1]);
        let r = RDescriptor::companion(m.clone()).unwrap();
        let v: Vec<Fp> = [2u64, 7, 1].iter().map(|&x| Fp::new(x)).collect();
        let expect = Poly::from_slice(&v).mul(&Poly::x()).rem(&m).unwrap().to_vec(3);
        assert_eq!(r.matvec(&v), expect);
        assert_eq!(r.to_dense().matvec(&v), expect);
    }

    #[test]
    fn rejects_bad_specs() {
        let c = DenseMatrix::from_i64_rows(&[&[1], &[0]]);
        let d = DenseMatrix::from_i64_rows(&[&[1, 0]]);
        let too_high = vec![vec![Poly::one()], vec![Poly::one(), p(&[0, 0, 1])]];
        assert!(matches!(
            RecurrenceSpec::new(1, (1, 0), too_high, c.clone(), d.clone(), RDescriptor::Shift(2)),
            Err(Error::InvalidSpec(_))
        ));
        let shared = vec![vec![Poly::x()], vec![Poly::one()]];
        assert_eq!(
            RecurrenceSpec::new(1, (0, 1), shared, c, d, RDescriptor::Shift(2)).unwrap_err(),
            Error::SharedRoots
        );
    }
}
