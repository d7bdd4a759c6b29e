use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Quadrature did not reach its target; carries the best estimate it had.
    #[error("quadrature did not converge: estimate {estimate:?} with error bound {error_bound:e}")]
    Accuracy { estimate: Vec<f64>, error_bound: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An implication of the class lattice was violated. Always a bug.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Parse(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Parse(e.to_string())
    }
}
