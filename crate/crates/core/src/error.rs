//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecayError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed record at row {row}: {reason}")]
    MalformedRecord { row: u64, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value in column {0}")]
    NonFinite(String),

    #[error("infeasible synthesis config: {0}")]
    Infeasible(String),

    #[error("bad file format in {path}: {reason}")]
    Format { path: String, reason: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl DecayError {
    /// True for errors caused by the data or configuration handed to us,
    /// as opposed to bugs in the library itself.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, DecayError::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, DecayError>;
