use thiserror::Error;

/// Errors raised by the library layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: dimensions must be at least 1")]
    InvalidDimension(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("shape mismatch: expected dimension {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
    #[error("vector is not normalized (norm = {0})")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("post-selection nearly orthogonal to pre-selection (overlap {0:e})")]
    OrthogonalPostselection(f64),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("truncation guard breached: population {0:e} on the top Fock levels")]
    Truncation(f64),
    #[error("weak-value estimation undefined: {0}")]
    EstimationUndefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
