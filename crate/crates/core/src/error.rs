use thiserror::Error;

/// Errors raised by model construction, propagation and the energetic solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    Bracketing { what: &'static str, lo: f64, hi: f64 },
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Bracketing { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
