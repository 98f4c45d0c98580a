use std::path::PathBuf;

use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error)]
pub enum HurstError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("series too short: need at least {required} samples, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("circulant embedding failed: eigenvalue {value:e} at index {index}")]
    EmbeddingFailure { index: usize, value: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("level range error: {0}")]
    LevelRange(String),
    #[error("fit window error: {0}")]
    FitWindow(String),
    #[error("fit domain error: {0}")]
    FitDomain(String),
    #[error("singular fit: {0}")]
    SingularFit(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("{}:{line}: {message}", path.display())]
    Ingest {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HurstError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HurstError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem rather than the numbers.
    pub fn is_io(&self) -> bool {
        matches!(self, HurstError::Io { .. } | HurstError::Ingest { .. })
    }
}

pub type Result<T> = std::result::Result<T, HurstError>;
