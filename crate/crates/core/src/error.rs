use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("point {0} lies outside the window")]
    OutsideWindow(usize),

    #[error("point {0} duplicates an earlier point")]
    DuplicatePoint(usize),

    #[error("two points coincide, so the ordering is undefined")]
    EqualPoints,

    #[error("{size} points exceed the enumeration cap of {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("configuration is not contained in the volume")]
    NotContained,

    #[error("hereditary positivity fails: {0}")]
    HereditaryPositivity(String),

    #[error("boundary condition is not admissible")]
    Inadmissible,

    #[error("all importance weights vanish")]
    DegenerateWeights,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
