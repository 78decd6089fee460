//! Matrices of low displacement rank: `L·A - A·R = C·D` (Sylvester) or `A - L·A·R = C·D` (Stein).
//!
//! Rows of `A` obey a recurrence over `Rᵀ` whose coefficients come from `L`. For a triangular
//! band `L` this is an ordinary width-Δ spec; for a quasiseparable `L` the whole structure matrix
//! `(L - XI)^{-1}` is reached through the resolvent instead.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::krylov::KrylovOperator;
use crate::multiply::transpose_mult_batched;
use crate::poly::Poly;
use crate::quasi::{resolvent, QuasiSep};
use crate::recurrence::{build_dyadic_tree, BandMatrix, DyadicTree, RDescriptor, RecurrenceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DisplacementOp {
    /// `L·A - A·R = C·D`.
    Sylvester,
    /// `A - L·A·R = C·D`.
    Stein,
}

/// `A` given implicitly by its displacement equation.
#[derive(Clone, Debug)]
pub struct DisplacementRep {
    pub op: DisplacementOp,
    pub l: RDescriptor,
    pub r: RDescriptor,
    /// `N×r` left generator.
    pub c: DenseMatrix,
    /// `r×N` right generator.
    pub d: DenseMatrix,
}

impl DisplacementRep {
    pub fn new(op: DisplacementOp, l: RDescriptor, r: RDescriptor, c: DenseMatrix, d: DenseMatrix) -> Result<Self> {
        let n = l.size();
        if r.size() != n || c.rows() != n || d.cols() != n || c.cols() != d.rows() {
            return Err(Error::Dimension(format!(
                "L is {n}, R is {}, C is {}x{}, D is {}x{}",
                r.size(),
                c.rows(),
                c.cols(),
                d.rows(),
                d.cols()
            )));
        }
        Ok(DisplacementRep { op, l, r, c, d })
    }

    pub fn size(&self) -> usize {
        self.l.size()
    }

    /// Number of generator columns.
    pub fn rank(&self) -> usize {
        self.c.cols()
    }

    /// Checks that the displacement operator is injective.
    ///
    /// Sylvester needs coprime characteristic polynomials of `L` and `R`; Stein needs
    /// `∏(1 - λ_i X)` over the eigenvalues of `L` coprime to that of `R`.
    pub fn check_unique(&self) -> Result<()> {
        let n = self.size();
        let cl = self.l.char_poly()?;
        let cr = self.r.char_poly()?;
        let lhs = match self.op {
            DisplacementOp::Sylvester => cl,
            DisplacementOp::Stein => cl.reverse(n),
        };
        if n > 0 && lhs.gcd(&cr).degree() != Some(0) {
            return Err(Error::DisplacementSingular);
        }
        Ok(())
    }
}

/// Rep of `Aᵀ`: Sylvester maps to `(Rᵀ, Lᵀ, -Dᵀ, Cᵀ)`, Stein to `(Rᵀ, Lᵀ, Dᵀ, Cᵀ)`.
pub fn transpose_rep(rep: &DisplacementRep) -> Result<DisplacementRep> {
    let c = match rep.op {
        DisplacementOp::Sylvester => rep.d.transpose().scale(-Fp::ONE),
        DisplacementOp::Stein => rep.d.transpose(),
    };
    DisplacementRep::new(rep.op, rep.r.transpose()?, rep.l.transpose()?, c, rep.c.transpose())
}

/// `L` as a lower band, an upper band, or a quasiseparable matrix.
enum LForm {
    Lower(BandMatrix),
    Upper(BandMatrix),
    Quasi(QuasiSep),
}

fn classify(l: &RDescriptor) -> Result<LForm> {
    Ok(match l {
        RDescriptor::Band(b) if b.is_lower() => LForm::Lower(b.clone()),
        RDescriptor::Band(b) => LForm::Upper(b.clone()),
        RDescriptor::Diagonal(z) => LForm::Lower(BandMatrix::new(z.len(), 0, true, |i, _| z[i])),
        RDescriptor::Shift(n) => LForm::Lower(BandMatrix::new(*n, 1, true, |i, j| if i == j { Fp::ZERO } else { Fp::ONE })),
        RDescriptor::Companion(_) => LForm::Quasi(QuasiSep::from_dense(&l.to_dense(), 1)?),
        RDescriptor::Quasi(q) => LForm::Quasi(q.clone()),
    })
}

fn band_spec(op: DisplacementOp, band: &BandMatrix, c: DenseMatrix, d: DenseMatrix, r_t: RDescriptor) -> Result<RecurrenceSpec> {
    let n = band.n();
    let delta = band.delta();
    let g = (0..n)
        .map(|i| {
            let lii = band.get(i, i);
            let mut row = vec![match op {
                DisplacementOp::Sylvester => Poly::from_coeffs(vec![lii, -Fp::ONE]),
                DisplacementOp::Stein => Poly::from_coeffs(vec![Fp::ONE, -lii]),
            }];
            for j in 1..=delta.min(i) {
                let v = band.get(i, i - j);
                row.push(match op {
                    DisplacementOp::Sylvester => Poly::constant(-v),
                    DisplacementOp::Stein => Poly::monomial(v, 1),
                });
            }
            row
        })
        .collect();
    RecurrenceSpec::new(delta, (0, 1), g, c, d, r_t).map_err(|e| match e {
        Error::SharedRoots => Error::DisplacementSingular,
        other => other,
    })
}

/// Recurrence over `Rᵀ` generating the rows of `A`, for a triangular band `L`.
///
/// With an upper-triangular `L` the rows come out in reverse order.
pub fn displacement_to_recurrence(rep: &DisplacementRep) -> Result<RecurrenceSpec> {
    rep.check_unique()?;
    let r_t = rep.r.transpose()?;
    match classify(&rep.l)? {
        LForm::Lower(b) => band_spec(rep.op, &b, rep.c.clone(), rep.d.clone(), r_t),
        LForm::Upper(b) => band_spec(rep.op, &b.reversed(), reverse_rows(&rep.c), rep.d.clone(), r_t),
        LForm::Quasi(_) => Err(Error::Unsupported("recurrence reduction needs a triangular band L".into())),
    }
}

fn reverse_rows(m: &DenseMatrix) -> DenseMatrix {
    let n = m.rows();
    DenseMatrix::from_fn(n, m.cols(), |i, j| m[(n - 1 - i, j)])
}

/// Precomputed route to `Aᵀ·B` for one rep.
#[derive(Clone, Debug)]
enum TransposePlan {
    Banded { spec: Box<RecurrenceSpec>, tree: Box<DyadicTree>, reversed: bool },
    Quasi { op: DisplacementOp, l: QuasiSep, c: DenseMatrix, modulus: Poly, den_inv: Poly, krylov: Vec<KrylovOperator> },
}

impl TransposePlan {
    fn new(rep: &DisplacementRep) -> Result<Self> {
        rep.check_unique()?;
        let r_t = rep.r.transpose()?;
        Ok(match classify(&rep.l)? {
            LForm::Lower(b) => {
                let spec = band_spec(rep.op, &b, rep.c.clone(), rep.d.clone(), r_t)?;
                let tree = build_dyadic_tree(&spec)?;
                TransposePlan::Banded { spec: Box::new(spec), tree: Box::new(tree), reversed: false }
            }
            LForm::Upper(b) => {
                let spec = band_spec(rep.op, &b.reversed(), reverse_rows(&rep.c), rep.d.clone(), r_t)?;
                let tree = build_dyadic_tree(&spec)?;
                TransposePlan::Banded { spec: Box::new(spec), tree: Box::new(tree), reversed: true }
            }
            LForm::Quasi(l) => {
                let n = rep.size();
                let modulus = rep.r.char_poly()?;
                let den = resolvent(&DenseMatrix::zeros(n, 0), &l, &DenseMatrix::zeros(n, 0)).den;
                let den = match rep.op {
                    DisplacementOp::Sylvester => den,
                    DisplacementOp::Stein => den.reverse(n),
                };
                let den_inv = if n == 0 {
                    Poly::zero()
                } else {
                    den.inv_mod(&modulus).map_err(|_| Error::DisplacementSingular)?
                };
                let krylov = (0..rep.rank())
                    .map(|k| KrylovOperator::new(&r_t, rep.d.row(k)))
                    .collect::<Result<Vec<_>>>()?;
                TransposePlan::Quasi { op: rep.op, l, c: rep.c.clone(), modulus, den_inv, krylov }
            }
        })
    }

    fn apply(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            TransposePlan::Banded { spec, tree, reversed } => {
                if *reversed {
                    transpose_mult_batched(spec, tree, &reverse_rows(b))
                } else {
                    transpose_mult_batched(spec, tree, b)
                }
            }
            TransposePlan::Quasi { op, l, c, modulus, den_inv, krylov } => {
                let n = l.size();
                let res = resolvent(b, l, c);
                let mut out = DenseMatrix::zeros(n, b.cols());
                for p in 0..b.cols() {
                    let mut col = vec![Fp::ZERO; n];
                    for (k, kr) in krylov.iter().enumerate() {
                        let num = &res.num[(p, k)];
                        let f = match op {
                            DisplacementOp::Sylvester => num.scale(-Fp::ONE).mul(den_inv).rem(modulus)?,
                            DisplacementOp::Stein => num.reverse(n.saturating_sub(1)).mul(den_inv).rem(modulus)?,
                        };
                        if f.is_zero() {
                            continue;
                        }
                        let part = kr.apply(&f.to_vec(n))?;
                        col.iter_mut().zip(part).for_each(|(a, v)| *a += v);
                    }
                    out.set_col(p, &col);
                }
                Ok(out)
            }
        }
    }
}

/// A displacement rep prepared for repeated products with `A` and `Aᵀ`.
#[derive(Clone, Debug)]
pub struct DisplacementOperator {
    n: usize,
    transpose: TransposePlan,
    forward: TransposePlan,
}

impl DisplacementOperator {
    pub fn new(rep: &DisplacementRep) -> Result<Self> {
        let transpose = TransposePlan::new(rep)?;
        let forward = TransposePlan::new(&transpose_rep(rep)?)?;
        Ok(DisplacementOperator { n: rep.size(), transpose, forward })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `A·B`, column by column.
    pub fn mul_matrix(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        self.check(b)?;
        self.forward.apply(b)
    }

    /// `Aᵀ·B`.
    pub fn mul_transpose_matrix(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        self.check(b)?;
        self.transpose.apply(b)
    }

    pub fn mul(&self, b: &[Fp]) -> Result<Vec<Fp>> {
        Ok(self.mul_matrix(&DenseMatrix::column(b))?.col(0))
    }

    pub fn mul_transpose(&self, b: &[Fp]) -> Result<Vec<Fp>> {
        Ok(self.mul_transpose_matrix(&DenseMatrix::column(b))?.col(0))
    }

    fn check(&self, b: &DenseMatrix) -> Result<()> {
        if b.rows() != self.n {
            return Err(Error::Dimension(format!("expected {} rows, got {}", self.n, b.rows())));
        }
        Ok(())
    }
}

/// `A·b`, or `Aᵀ·b` when `transposed` is set.
pub fn disp_mult(rep: &DisplacementRep, b: &[Fp], transposed: bool) -> Result<Vec<Fp>> {
    if transposed {
        Ok(TransposePlan::new(rep)?.apply(&DenseMatrix::column(b))?.col(0))
    } else {
        Ok(TransposePlan::new(&transpose_rep(rep)?)?.apply(&DenseMatrix::column(b))?.col(0))
    }
}
