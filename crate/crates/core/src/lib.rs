//! Classification of ℤ/dℤ codes arising as quotients of lattices by sublattices spanned
//! by minimal vectors, together with the minimal-class invariants and index systems.

pub mod catalog;
pub mod classify;
pub mod codes;
pub mod eutaxy;
pub mod face;
pub mod feasibility;
pub mod index_system;
pub mod io;
pub mod isometry;
pub mod lattice;
pub mod ldlt;
pub mod lp;
pub mod matrix;
pub mod normal_form;
pub mod num;

pub use lattice::{GramMatrix, MinVecSet};
pub use matrix::{Matrix, SymMatrix};
pub use num::{Field, Rational};

/// Exact rational matrix.
pub type RatMatrix = Matrix<Rational>;
/// Arbitrary-precision integer matrix.
pub type IntMatrix = normal_form::IntMatrix;
/// Lattice vector in basis coordinates.
pub type IntVector = Vec<i64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("input does not have full rank")]
    RankDeficient,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
