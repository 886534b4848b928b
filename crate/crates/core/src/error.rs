use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain on which the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two series or fields that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The fixed-point iteration produced a non-finite iterate.
    #[error("iteration diverged: non-finite iterate at step {iteration}")]
    Divergence { iteration: usize },
    /// A quantity that must be strictly positive vanished.
    #[error("positivity violated: {0}")]
    Positivity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
