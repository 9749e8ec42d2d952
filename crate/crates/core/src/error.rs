use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the numeric model and the subspace layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("structure parameter n = {0} is below the minimum of 2")]
    InvalidHalfDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subspace parameter k = {k} outside 1..={max}")]
    InvalidSubspaceRank { k: usize, max: usize },

    #[error("vector is not in the subspace (normal component {0:.3e})")]
    NotInSubspace(f64),

    #[error("vector is not normal to the subspace (tangential component {0:.3e})")]
    NotNormal(f64),

    #[error("operation requires an invariant or anti-invariant subspace, found a mixed one")]
    MixedSubspace,

    #[error("operation requires an {expected} subspace, found {found}")]
    WrongSubspaceClass {
        expected: &'static str,
        found: &'static str,
    },

    #[error("degenerate construction: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Symbolic(#[from] crate::symbolic::SymbolicError),
}
