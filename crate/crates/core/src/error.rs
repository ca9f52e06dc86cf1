use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A feasibility guard (variable count, set size) refused the request.
    #[error("refused by guard: {0}")]
    GuardRefused(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("conflict budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("witness failed verification: {0}")]
    WitnessRejected(String),

    #[error("external solver bridge: {0}")]
    Bridge(String),

    #[error("insufficient sample: {0}")]
    InsufficientSample(String),

    #[error("fit refused: {0}")]
    FitRefused(String),

    #[error("config rejected: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Config(Vec<FieldError>),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A single field-level validation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
