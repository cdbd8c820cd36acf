use thiserror::Error;

/// Errors surfaced by the library's fallible operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bit-state length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("cell index {index} out of range for state length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("state length {0} is degenerate for this operation (need >= 2)")]
    DegenerateLength(usize),

    #[error("node-count exponent {0} out of range (need 1..=16)")]
    NodeExponentOutOfRange(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training window is empty")]
    EmptyWindow,

    #[error("insufficient samples: need at least {required}, got {got}")]
    InsufficientSamples { required: u64, got: u64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
