use thiserror::Error;

use crate::vector::IntVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("cone contains a line")]
    NotPointed,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("solution set is unbounded")]
    Unbounded,

    #[error("finiteness not certified after {slices} slices")]
    FinitenessNotCertified { slices: usize },

    #[error("auxiliary class is orthogonal to the root {0}; choose a different class")]
    OrthogonalRoot(IntVector),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid involution: {0}")]
    InvalidInvolution(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown lattice `{0}`")]
    UnknownLattice(String),

    #[error("integer overflow")]
    Overflow,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
