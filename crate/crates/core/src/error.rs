//! Library error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero modulus")]
    ZeroModulus,
    #[error("not invertible modulo m")]
    NotInvertible,
    #[error("leading coefficients share roots with modulus")]
    SharedRoots,
    #[error("displacement operator not invertible")]
    DisplacementSingular,
    #[error("not strongly regular")]
    NotStronglyRegular,
    #[error("matrix singular")]
    Singular,
    #[error("insufficient constraints")]
    InsufficientConstraints,
    #[error("repeated evaluation points")]
    RepeatedPoints,
    #[error("zero coordinate at point {0}")]
    ZeroCoordinate(usize),
    #[error("off-diagonal rank {rank} exceeds order {order}")]
    RankExceeded { rank: usize, order: usize },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
