use thiserror::Error;

/// Errors raised by the library. Each variant is one error family; the CLI
/// maps families to distinct exit codes.
#[derive(Debug, Error)]
pub enum FlowError {
    #[error("dimension mismatch: expected {expected_width}x{expected_height}, got {width}x{height}")]
    Dimension {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot read image {path}: {reason}")]
    Ingestion { path: String, reason: String },

    #[error("flow file format error at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = FlowError> = std::result::Result<T, E>;

impl FlowError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        FlowError::Config(msg.into())
    }
}
