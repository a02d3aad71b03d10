use thiserror::Error;

/// Errors shared by every module of the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (only 2 and 3 are supported)")]
    UnsupportedDimension(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("facility collision: {0}")]
    FacilityCollision(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, VgError>;
