//! JSON form of a recurrence spec. All numbers are field residues.

use serde::{Deserialize, Serialize};

use recwidth::quasi::QuasiSep;
use recwidth::{BandMatrix, DenseMatrix, Fp, Poly, RDescriptor, RecurrenceSpec};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RKindTag {
    Shift,
    Companion,
    Diagonal,
    Band,
    Quasi,
}

/// Operator-specific payload; unused fields are omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RData {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Dense rows of a band or quasiseparable operator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub n: usize,
    pub rows: usize,
    pub t: usize,
    pub r: usize,
    pub degree: [usize; 2],
    /// Monic modulus of a companion operator, lowest coefficient first.
    pub modulus: Option<Vec<u32>>,
    pub r_kind: RKindTag,
    #[serde(default)]
    pub r_data: RData,
    pub g: Vec<Vec<Vec<u32>>>,
    pub c: Vec<Vec<u32>>,
    pub d: Vec<Vec<u32>>,
}

fn residues(v: &[Fp]) -> Vec<u32> {
    v.iter().map(|x| x.value()).collect()
}

fn elements(v: &[u32]) -> Vec<Fp> {
    v.iter().map(|&x| Fp::new(x as u64)).collect()
}

fn matrix_rows(m: &DenseMatrix) -> Vec<Vec<u32>> {
    (0..m.rows()).map(|i| residues(m.row(i))).collect()
}

fn matrix(rows: &[Vec<u32>], cols: usize, what: &str) -> Result<DenseMatrix, CliError> {
    if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
        return Err(CliError::Format(format!("{what} row {bad} has {} entries, expected {cols}", rows[bad].len())));
    }
    let rows: Vec<Vec<Fp>> = rows.iter().map(|r| elements(r)).collect();
    Ok(DenseMatrix::from_rows(&rows, cols))
}

impl SpecFile {
    pub fn from_spec(spec: &RecurrenceSpec) -> Self {
        let (d, dbar) = spec.degree();
        let mut modulus = None;
        let mut r_data = RData::default();
        let r_kind = match spec.r_desc() {
            RDescriptor::Shift(_) => RKindTag::Shift,
            RDescriptor::Companion(m) => {
                modulus = Some(residues(m.coeffs()));
                RKindTag::Companion
            }
            RDescriptor::Diagonal(z) => {
                r_data.points = Some(residues(z));
                RKindTag::Diagonal
            }
            RDescriptor::Band(b) => {
                r_data.delta = Some(b.delta());
                r_data.lower = Some(b.is_lower());
                r_data.matrix = Some(matrix_rows(&b.to_dense()));
                RKindTag::Band
            }
            RDescriptor::Quasi(q) => {
                r_data.order = Some(q.order());
                r_data.matrix = Some(matrix_rows(&q.to_dense()));
                RKindTag::Quasi
            }
        };
        SpecFile {
            n: spec.cols(),
            rows: spec.rows(),
            t: spec.width(),
            r: spec.rank(),
            degree: [d, dbar],
            modulus,
            r_kind,
            r_data,
            g: (0..spec.rows()).map(|i| spec.g_row(i).iter().map(|p| residues(p.coeffs())).collect()).collect(),
            c: matrix_rows(spec.c()),
            d: matrix_rows(spec.d()),
        }
    }

    pub fn to_spec(&self) -> Result<RecurrenceSpec, CliError> {
        let n = self.n;
        let missing = |field: &str| CliError::Format(format!("{:?} operator needs r_data.{field}", self.r_kind));
        let r_desc = match self.r_kind {
            RKindTag::Shift => RDescriptor::Shift(n),
            RKindTag::Companion => {
                let m = self.modulus.as_ref().ok_or_else(|| CliError::Format("companion operator needs modulus".into()))?;
                RDescriptor::companion(Poly::from_coeffs(elements(m)))?
            }
            RKindTag::Diagonal => RDescriptor::Diagonal(elements(self.r_data.points.as_ref().ok_or_else(|| missing("points"))?)),
            RKindTag::Band => {
                let m = matrix(self.r_data.matrix.as_ref().ok_or_else(|| missing("matrix"))?, n, "r_data.matrix")?;
                let delta = self.r_data.delta.ok_or_else(|| missing("delta"))?;
                RDescriptor::Band(BandMatrix::from_dense(&m, delta, self.r_data.lower.unwrap_or(true))?)
            }
            RKindTag::Quasi => {
                let m = matrix(self.r_data.matrix.as_ref().ok_or_else(|| missing("matrix"))?, n, "r_data.matrix")?;
                RDescriptor::Quasi(QuasiSep::from_dense(&m, self.r_data.order.ok_or_else(|| missing("order"))?)?)
            }
        };
        if self.g.len() != self.rows {
            return Err(CliError::Format(format!("g has {} rows, expected {}", self.g.len(), self.rows)));
        }
        let g = self.g.iter().map(|row| row.iter().map(|p| Poly::from_coeffs(elements(p))).collect()).collect();
        let c = matrix(&self.c, self.r, "c")?;
        let d = matrix(&self.d, n, "d")?;
        if c.rows() != self.rows || d.rows() != self.r {
            return Err(CliError::Format("c must be rows×r and d must be r×n".into()));
        }
        Ok(RecurrenceSpec::new(self.t, (self.degree[0], self.degree[1]), g, c, d, r_desc)?)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }
}
