//! Exact structured linear algebra over a prime field for matrices whose rows satisfy a
//! short polynomial recurrence.
//!
//! The central object is a [`RecurrenceSpec`]: rows `a_i` of an `M × N` matrix related by
//! `g_{i,0}(R)·a_i = Σ_j g_{i,j}(R)·a_{i-j} + Σ_k C[i,k]·d_k` for a structured `N × N` matrix `R`.
//! Given such a spec, [`transpose_mult`] and [`forward_mult`] compute `Aᵀb` and `Ax` in
//! quasi-linear time after a one-off tree build, and the [`solvers`] module inverts them.

pub mod apps;
pub mod dense;
pub mod displacement;
pub mod error;
pub mod evaltree;
pub mod field;
pub mod fixtures;
pub mod krylov;
pub mod multiply;
pub mod oracle;
pub mod poly;
pub mod polymat;
pub mod quasi;
pub mod recovery;
pub mod recurrence;
pub mod rng;
pub mod solvers;

pub use dense::DenseMatrix;
pub use displacement::{disp_mult, DisplacementOp, DisplacementOperator, DisplacementRep};
pub use error::{Error, Result};
pub use field::Fp;
pub use krylov::KrylovOperator;
pub use multiply::{forward_mult, transpose_mult, transpose_mult_batched};
pub use poly::Poly;
pub use recovery::{recover_recurrence, FitReport};
pub use recurrence::{build_dyadic_tree, BandMatrix, DyadicTree, RDescriptor, RecurrenceSpec};
pub use solvers::{displacement_inverse, triangular_solve, TriangularSolver};
