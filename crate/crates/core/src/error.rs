use thiserror::Error;

use crate::state::ValidationReport;

/// Errors produced by state construction, measure evaluation and parsing.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Matrix or vector shape is unusable (non-square, n < 2, index out of range,
    /// mismatched dimensions between operands).
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A numeric argument is outside its admissible interval.
    #[error("range error: {0}")]
    Range(String),

    /// The matrix is not a valid density matrix; the report carries the defects.
    #[error("state validation failed: {reason}", reason = .0.reason().unwrap_or("unknown"))]
    Validation(ValidationReport),

    /// An amplitude vector is not normalized and renormalization was not requested.
    #[error("normalization error: |Σ|c_j|² − 1| = {defect:e} exceeds tolerance")]
    Normalization { defect: f64 },

    /// Input text does not encode a state in the documented JSON format.
    #[error("parse error: {0}")]
    Parse(String),

    /// An interference pattern with a non-positive intensity range; cannot
    /// happen for unit-trace states but guarded against anyway.
    #[error("degenerate pattern: I_max + I_min = {0:e}")]
    DegeneratePattern(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
