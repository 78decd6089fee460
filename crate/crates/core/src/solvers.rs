//! Solving with triangular recurrence matrices and inverting displacement reps.

use crate::dense::DenseMatrix;
use crate::displacement::{DisplacementOp, DisplacementOperator, DisplacementRep};
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::poly::{correlate, Poly};
use crate::polymat::PolyMat;
use crate::quasi::QuasiSep;
use crate::recurrence::{RDescriptor, RecurrenceSpec};

const DENSE_BLOCK: usize = 32;

/// Product tree of one-step transitions over a contiguous range of rows.
struct StepNode {
    lo: usize,
    len: usize,
    prod: PolyMat,
    children: Option<Box<(StepNode, StepNode)>>,
}

/// Unit-leading recurrence data for rows `t..N` of a triangular spec.
struct Stepper {
    t: usize,
    n: usize,
    /// `coef[i][j-1] = g_{i,j} / g_{i,0}`.
    coef: Vec<Vec<Poly>>,
}

impl Stepper {
    /// Maps the state `(p_{i-t}, …, p_{i-1})` to `(p_{i-t+1}, …, p_i)`.
    fn step(&self, i: usize) -> PolyMat {
        let t = self.t;
        let mut m = PolyMat::zeros(t, t);
        for s in 0..t - 1 {
            m[(s, s + 1)] = Poly::one();
        }
        for (j, c) in self.coef[i].iter().enumerate() {
            m[(t - 1, t - 1 - j)] = c.clone();
        }
        m
    }

    fn build(&self, lo: usize, len: usize) -> StepNode {
        if len == 1 {
            return StepNode { lo, len, prod: self.step(lo), children: None };
        }
        let half = len / 2;
        let left = self.build(lo, half);
        let right = self.build(lo + half, len - half);
        let prod = right.prod.mul_trunc(&left.prod, Some(self.n));
        StepNode { lo, len, prod, children: Some(Box::new((left, right))) }
    }

    /// The next `len` rows from `heads`, truncated below `X^limit`.
    fn rows(&self, lo: usize, len: usize, heads: &[Poly], limit: usize) -> Vec<Poly> {
        let t = self.t;
        let mut state: Vec<Poly> = heads.to_vec();
        let mut out = Vec::with_capacity(len);
        for i in lo..lo + len {
            let mut p = Poly::zero();
            for (j, c) in self.coef[i].iter().enumerate() {
                p += &c.mul_trunc(&state[t - 1 - j], limit);
            }
            state.remove(0);
            state.push(p.clone());
            out.push(p);
        }
        out
    }

    /// `Σ_i x_i · (bottom row of the product up to and including step i)`.
    fn row_functional(&self, node: &StepNode, x: &[Fp]) -> Vec<Poly> {
        let t = self.t;
        if x.iter().all(|v| v.is_zero()) {
            return vec![Poly::zero(); t];
        }
        match &node.children {
            None => node.prod.row(t - 1).iter().map(|p| p.scale(x[0])).collect(),
            Some(ch) => {
                let (left, right) = (&ch.0, &ch.1);
                let pl = self.row_functional(left, &x[..left.len]);
                let pr = self.row_functional(right, &x[left.len..]);
                (0..t)
                    .map(|s| {
                        let mut acc = pl[s].clone();
                        for (s2, p) in pr.iter().enumerate() {
                            if !p.is_zero() {
                                acc += &p.mul_trunc(&left.prod[(s2, s)], self.n);
                            }
                        }
                        acc
                    })
                    .collect()
            }
        }
    }

    /// Adjoint of [`Self::row_functional`]: pairs each row's bottom-row product with `chi`.
    fn pair_rows(&self, node: &StepNode, chi: &[Vec<Fp>], out: &mut [Fp]) {
        let t = self.t;
        match &node.children {
            None => {
                out[0] = node
                    .prod
                    .row(t - 1)
                    .iter()
                    .zip(chi)
                    .map(|(p, c)| p.coeffs().iter().zip(c).map(|(&a, &b)| a * b).sum::<Fp>())
                    .sum();
            }
            Some(ch) => {
                let (left, right) = (&ch.0, &ch.1);
                let (ol, or) = out.split_at_mut(left.len);
                self.pair_rows(left, chi, ol);
                let len = right.len + t + 1;
                let shifted: Vec<Vec<Fp>> = (0..t)
                    .map(|s2| {
                        let mut acc = vec![Fp::ZERO; len];
                        for (s, c) in chi.iter().enumerate() {
                            let part = correlate(c, &left.prod[(s2, s)], len);
                            acc.iter_mut().zip(part).for_each(|(a, v)| *a += v);
                        }
                        acc
                    })
                    .collect();
                self.pair_rows(right, &shifted, or);
            }
        }
    }

    /// Drops coefficients of the heads that no entry of the block can reach.
    fn normalize(&self, heads: &[Poly], offset: usize, len: usize) -> (Vec<Poly>, usize) {
        let drop = offset.saturating_sub(len + self.t);
        let o = offset - drop;
        (heads.iter().map(|h| h.shift_down(drop).truncate(o + len)).collect(), o)
    }

    fn dense_block(&self, lo: usize, len: usize, heads: &[Poly], offset: usize) -> DenseMatrix {
        let rows = self.rows(lo, len, heads, offset + len);
        DenseMatrix::from_fn(len, len, |i, c| rows[i].coeff(offset + c))
    }

    /// Solves `Mᵀx = y` for the block whose entry `(i, c)` is the `X^{offset+c}` coefficient of row `lo+i`.
    fn solve_transpose(&self, node: &StepNode, heads: &[Poly], offset: usize, y: &[Fp]) -> Vec<Fp> {
        let (heads, offset) = self.normalize(heads, offset, node.len);
        let Some(ch) = node.children.as_ref().filter(|_| node.len > DENSE_BLOCK) else {
            let m = self.dense_block(node.lo, node.len, &heads, offset);
            return back_substitute_transpose(&m, y);
        };
        let (left, right) = (&ch.0, &ch.1);
        let n1 = left.len;
        let next = advance(&left.prod, &heads, offset + node.len);
        let x2 = self.solve_transpose(right, &next, offset + n1, &y[n1..]);
        let pr = self.row_functional(right, &x2);
        let mut coupling = Poly::zero();
        for (p, h) in pr.iter().zip(&next) {
            coupling += &p.mul_trunc(h, offset + n1);
        }
        let y1: Vec<Fp> = y[..n1].iter().zip(coupling.shift_down(offset).to_vec(n1)).map(|(&a, b)| a - b).collect();
        let mut x = self.solve_transpose(left, &heads, offset, &y1);
        x.extend(x2);
        x
    }

    /// Solves `Mx = y` for the same block.
    fn solve_forward(&self, node: &StepNode, heads: &[Poly], offset: usize, y: &[Fp]) -> Vec<Fp> {
        let (heads, offset) = self.normalize(heads, offset, node.len);
        let Some(ch) = node.children.as_ref().filter(|_| node.len > DENSE_BLOCK) else {
            let m = self.dense_block(node.lo, node.len, &heads, offset);
            return forward_substitute(&m, y);
        };
        let (left, right) = (&ch.0, &ch.1);
        let n1 = left.len;
        let mut x = self.solve_forward(left, &heads, offset, &y[..n1]);
        let next = advance(&left.prod, &heads, offset + node.len);
        let coupling = self.coupling_forward(right, &next, offset, &x);
        let y2: Vec<Fp> = y[n1..].iter().zip(coupling).map(|(&a, b)| a - b).collect();
        x.extend(self.solve_forward(right, &next, offset + n1, &y2));
        x
    }

    /// For each row of `node` generated from `heads`, `Σ_c x[c]·coeff_{offset+c}`.
    fn coupling_forward(&self, node: &StepNode, heads: &[Poly], offset: usize, x: &[Fp]) -> Vec<Fp> {
        let mut psi = vec![Fp::ZERO; offset + x.len()];
        psi[offset..].copy_from_slice(x);
        let len = node.len + self.t + 1;
        let chi: Vec<Vec<Fp>> = heads.iter().map(|h| correlate(&psi, h, len)).collect();
        let mut out = vec![Fp::ZERO; node.len];
        self.pair_rows(node, &chi, &mut out);
        out
    }
}

fn advance(prod: &PolyMat, heads: &[Poly], limit: usize) -> Vec<Poly> {
    (0..heads.len())
        .map(|s| {
            let mut acc = Poly::zero();
            for (k, h) in heads.iter().enumerate() {
                let e = &prod[(s, k)];
                if !e.is_zero() && !h.is_zero() {
                    acc += &e.mul_trunc(h, limit);
                }
            }
            acc
        })
        .collect()
}

/// `Mᵀx = y` for lower-triangular `M`.
fn back_substitute_transpose(m: &DenseMatrix, y: &[Fp]) -> Vec<Fp> {
    let n = y.len();
    let mut x = vec![Fp::ZERO; n];
    for c in (0..n).rev() {
        let mut acc = y[c];
        for (i, &xi) in x.iter().enumerate().skip(c + 1) {
            acc -= m[(i, c)] * xi;
        }
        x[c] = acc * m[(c, c)].inv();
    }
    x
}

/// `Mx = y` for lower-triangular `M`.
fn forward_substitute(m: &DenseMatrix, y: &[Fp]) -> Vec<Fp> {
    let n = y.len();
    let mut x = vec![Fp::ZERO; n];
    for i in 0..n {
        let mut acc = y[i];
        for (c, &xc) in x.iter().enumerate().take(i) {
            acc -= m[(i, c)] * xc;
        }
        x[i] = acc * m[(i, i)].inv();
    }
    x
}

/// Precomputed solver for a square triangular spec over `X^N`.
///
/// The spec must have constant leading coefficients, `deg g_{i,j} ≤ j`, and errors confined to
/// the first `t` rows; row `i` must have degree exactly `i`.
pub struct TriangularSolver {
    stepper: Stepper,
    heads: Vec<Poly>,
    top: DenseMatrix,
    tree: Option<StepNode>,
}

impl TriangularSolver {
    pub fn new(spec: &RecurrenceSpec) -> Result<Self> {
        let n = spec.cols();
        if !matches!(spec.r_desc(), RDescriptor::Shift(_)) || spec.rows() != n {
            return Err(Error::Unsupported("triangular solves need a square spec over X^N".into()));
        }
        let t = spec.width().max(1);
        for i in 0..n {
            if spec.g(i, 0).degree() != Some(0) {
                return Err(Error::Unsupported(format!("row {i} has a non-constant leading coefficient")));
            }
            for j in 1..spec.g_row(i).len() {
                if spec.g(i, j).degree().is_some_and(|dg| dg > j) {
                    return Err(Error::Unsupported(format!("deg g[{i}][{j}] exceeds {j}")));
                }
            }
            if i >= t && (0..spec.rank()).any(|k| !spec.c()[(i, k)].is_zero()) {
                return Err(Error::Unsupported(format!("row {i} carries an error term")));
            }
        }
        let coef: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                let inv = spec.g(i, 0).coeff(0).inv();
                (1..=t).map(|j| spec.g(i, j).scale(inv)).collect()
            })
            .collect();
        let stepper = Stepper { t, n, coef };
        let th = t.min(n);
        let mut heads: Vec<Poly> = Vec::with_capacity(t);
        for i in 0..th {
            let mut row = Poly::zero();
            for k in 0..spec.rank() {
                row += &Poly::from_slice(spec.d().row(k)).scale(spec.c()[(i, k)]);
            }
            for j in 1..=i {
                row += &spec.g(i, j).mul_trunc(&heads[i - j], n);
            }
            let row = row.scale(spec.g(i, 0).coeff(0).inv()).truncate(n);
            if row.degree() != Some(i) {
                return Err(Error::Singular);
            }
            heads.push(row);
        }
        while heads.len() < t {
            heads.insert(0, Poly::zero());
        }
        let mut tau: Vec<Fp> = heads[t - th..].iter().enumerate().map(|(i, h)| h.coeff(i)).collect();
        for i in th..n {
            let v: Fp = (1..=t.min(i)).map(|j| stepper.coef[i][j - 1].coeff(j) * tau[i - j]).sum();
            if v.is_zero() {
                return Err(Error::Singular);
            }
            tau.push(v);
        }
        let top = DenseMatrix::from_fn(th, th, |i, c| heads[t - th + i].coeff(c));
        let tree = (n > th).then(|| stepper.build(th, n - th));
        Ok(TriangularSolver { stepper, heads, top, tree })
    }

    fn split(&self) -> usize {
        self.top.rows()
    }

    /// `x` with `Aᵀx = y`.
    pub fn solve_transpose(&self, y: &[Fp]) -> Result<Vec<Fp>> {
        self.check(y)?;
        let th = self.split();
        let mut rest = Vec::new();
        let mut yh = y[..th].to_vec();
        if let Some(root) = &self.tree {
            rest = self.stepper.solve_transpose(root, &self.heads, th, &y[th..]);
            let pr = self.stepper.row_functional(root, &rest);
            let mut coupling = Poly::zero();
            for (p, h) in pr.iter().zip(&self.heads) {
                coupling += &p.mul_trunc(h, th);
            }
            yh.iter_mut().zip(coupling.to_vec(th)).for_each(|(a, b)| *a -= b);
        }
        let mut x = back_substitute_transpose(&self.top, &yh);
        x.extend(rest);
        Ok(x)
    }

    /// `x` with `Ax = y`.
    pub fn solve(&self, y: &[Fp]) -> Result<Vec<Fp>> {
        self.check(y)?;
        let th = self.split();
        let mut x = forward_substitute(&self.top, &y[..th]);
        if let Some(root) = &self.tree {
            let coupling = self.stepper.coupling_forward(root, &self.heads, 0, &x);
            let y2: Vec<Fp> = y[th..].iter().zip(coupling).map(|(&a, b)| a - b).collect();
            x.extend(self.stepper.solve_forward(root, &self.heads, th, &y2));
        }
        Ok(x)
    }

    fn check(&self, y: &[Fp]) -> Result<()> {
        if y.len() != self.stepper.n {
            return Err(Error::Dimension(format!("expected length {}, got {}", self.stepper.n, y.len())));
        }
        Ok(())
    }
}

/// Solves `Aᵀx = y`, or `Ax = y` when `forward` is set; preconditions as for [`TriangularSolver`].
pub fn triangular_solve(spec: &RecurrenceSpec, y: &[Fp], forward: bool) -> Result<Vec<Fp>> {
    let solver = TriangularSolver::new(spec)?;
    if forward {
        solver.solve(y)
    } else {
        solver.solve_transpose(y)
    }
}

/// Minimal-width `(G', H')` with `G'H'ᵀ = GHᵀ`, by two rank factorizations.
pub fn generator_compress(g: &DenseMatrix, h: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    assert_eq!(g.cols(), h.cols(), "generator widths differ");
    let (u1, w1) = g.rank_factor();
    let z = h.mul(&w1);
    let (y, rz) = z.transpose().rank_factor();
    (u1.mul(&y), rz)
}

const INVERSE_BASE: usize = 8;

fn quasi_of(desc: &RDescriptor) -> Result<QuasiSep> {
    let order = match desc {
        RDescriptor::Quasi(q) => q.order(),
        RDescriptor::Band(b) => b.delta(),
        _ => 1,
    }
    .max(1);
    QuasiSep::from_dense(&desc.to_dense(), order)
}

/// Generators of `A^{-1}` for a Sylvester rep: `R·A^{-1} - A^{-1}·L = G'H'ᵀ`.
///
/// Recurses on the leading block and its Schur complement; requires every leading principal
/// minor of `A` to be nonzero.
pub fn displacement_inverse(rep: &DisplacementRep) -> Result<DisplacementRep> {
    if rep.op != DisplacementOp::Sylvester {
        return Err(Error::Unsupported("inversion is implemented for Sylvester reps".into()));
    }
    rep.check_unique()?;
    let l = quasi_of(&rep.l)?;
    let r = quasi_of(&rep.r)?;
    let (g, h) = invert(&l, &r, &rep.c, &rep.d.transpose())?;
    DisplacementRep::new(DisplacementOp::Sylvester, rep.r.clone(), rep.l.clone(), g, h.transpose())
}

fn operator(l: &QuasiSep, r: &QuasiSep, g: &DenseMatrix, h: &DenseMatrix) -> Result<DisplacementOperator> {
    let rep = DisplacementRep::new(
        DisplacementOp::Sylvester,
        RDescriptor::Quasi(l.clone()),
        RDescriptor::Quasi(r.clone()),
        g.clone(),
        h.transpose(),
    )?;
    DisplacementOperator::new(&rep)
}

fn pad_top(m: &DenseMatrix, n1: usize) -> DenseMatrix {
    DenseMatrix::vcat(&[&DenseMatrix::zeros(n1, m.cols()), m])
}

fn pad_bottom(m: &DenseMatrix, n2: usize) -> DenseMatrix {
    DenseMatrix::vcat(&[m, &DenseMatrix::zeros(n2, m.cols())])
}

fn top(m: &DenseMatrix, n1: usize) -> DenseMatrix {
    m.block(0, n1, 0, m.cols())
}

fn bottom(m: &DenseMatrix, n1: usize) -> DenseMatrix {
    m.block(n1, m.rows(), 0, m.cols())
}

/// Returns `(G', H')` with `R·A^{-1} - A^{-1}·L = G'H'ᵀ` where `L·A - A·R = GHᵀ`.
fn invert(l: &QuasiSep, r: &QuasiSep, g: &DenseMatrix, h: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = l.size();
    let a = operator(l, r, g, h)?;
    let (QuasiSep::Node(ln), QuasiSep::Node(rn)) = (l, r) else {
        return invert_dense(&a, g, h);
    };
    if n <= INVERSE_BASE || ln.r11.size() != rn.r11.size() {
        return invert_dense(&a, g, h);
    }
    let n1 = ln.r11.size();
    let n2 = n - n1;
    let neg = |m: &DenseMatrix| m.scale(-Fp::ONE);
    let (g1, g2) = (top(g, n1), bottom(g, n1));
    let (h1, h2) = (top(h, n1), bottom(h, n1));

    let a_ul = a.mul_matrix(&pad_top(&rn.ul, n1))?;
    let a_uu = a.mul_matrix(&pad_bottom(&rn.uu, n2))?;
    let at_vu = a.mul_transpose_matrix(&pad_top(&ln.vu, n1))?;
    let at_vl = a.mul_transpose_matrix(&pad_bottom(&ln.vl, n2))?;

    let g11 = DenseMatrix::hcat(&[&g1, &neg(&ln.uu), &top(&a_ul, n1)]);
    let h11 = DenseMatrix::hcat(&[&h1, &top(&at_vu, n1), &rn.vl]);
    let g22 = DenseMatrix::hcat(&[&g2, &neg(&ln.ul), &bottom(&a_uu, n1)]);
    let h22 = DenseMatrix::hcat(&[&h2, &bottom(&at_vl, n1), &rn.vu]);
    let g21 = DenseMatrix::hcat(&[&g2, &neg(&ln.ul), &bottom(&a_ul, n1)]);
    let h21 = DenseMatrix::hcat(&[&h1, &top(&at_vl, n1), &rn.vl]);
    let g12 = DenseMatrix::hcat(&[&g1, &neg(&ln.uu), &top(&a_uu, n1)]);
    let h12 = DenseMatrix::hcat(&[&h2, &bottom(&at_vu, n1), &rn.vu]);

    let (g11, h11) = generator_compress(&g11, &h11);
    let (gx, hx) = invert(&ln.r11, &rn.r11, &g11, &h11)?;
    let x = operator(&rn.r11, &ln.r11, &gx, &hx)?;

    let a21 = |m: &DenseMatrix| -> Result<DenseMatrix> { Ok(bottom(&a.mul_matrix(&pad_bottom(m, n2))?, n1)) };
    let a12t = |m: &DenseMatrix| -> Result<DenseMatrix> { Ok(bottom(&a.mul_transpose_matrix(&pad_bottom(m, n2))?, n1)) };
    let a12 = |m: &DenseMatrix| -> Result<DenseMatrix> { Ok(top(&a.mul_matrix(&pad_top(m, n1))?, n1)) };
    let a21t = |m: &DenseMatrix| -> Result<DenseMatrix> { Ok(top(&a.mul_transpose_matrix(&pad_top(m, n1))?, n1)) };

    let gs = DenseMatrix::hcat(&[
        &g22,
        &neg(&g21),
        &neg(&a21(&gx)?),
        &neg(&a21(&x.mul_matrix(&g12)?)?),
    ]);
    let hs = DenseMatrix::hcat(&[&h22, &a12t(&x.mul_transpose_matrix(&h21)?)?, &a12t(&hx)?, &h12]);
    let (gs, hs) = generator_compress(&gs, &hs);
    let (gsi, hsi) = invert(&ln.r22, &rn.r22, &gs, &hs)?;
    let s_inv = operator(&rn.r22, &ln.r22, &gsi, &hsi)?;

    let y1 = x.mul_matrix(&g1)?;
    let z2 = s_inv.mul_matrix(&g2.sub(&a21(&y1)?))?;
    let z1 = y1.sub(&x.mul_matrix(&a12(&z2)?)?);
    let g_out = neg(&DenseMatrix::vcat(&[&z1, &z2]));

    let u1 = x.mul_transpose_matrix(&h1)?;
    let w2 = s_inv.mul_transpose_matrix(&h2.sub(&a12t(&u1)?))?;
    let w1 = u1.sub(&x.mul_transpose_matrix(&a21t(&w2)?)?);
    let h_out = DenseMatrix::vcat(&[&w1, &w2]);
    Ok(generator_compress(&g_out, &h_out))
}

fn invert_dense(a: &DisplacementOperator, g: &DenseMatrix, h: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = a.size();
    let dense = a.mul_matrix(&DenseMatrix::identity(n))?;
    let inv = dense.inverse_no_pivot()?;
    let g_out = inv.mul(g).scale(-Fp::ONE);
    let h_out = inv.transpose().mul(h);
    Ok(generator_compress(&g_out, &h_out))
}
