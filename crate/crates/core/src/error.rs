use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input text. `location` is a line number or byte offset.
    #[error("{source_name}: {location}: {message}")]
    Parse {
        source_name: String,
        location: String,
        message: String,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("window exceeds record: {0}")]
    WindowOutOfRange(String),

    #[error("training data must contain both classes (found only {0})")]
    SingleClass(i8),

    #[error("pattern {index} has non-positive sum {sum}")]
    NonPositivePattern { index: usize, sum: f64 },

    #[error(
        "solver hit the iteration limit after {iterations} iterations \
         (violation gap {gap:e}, dual objective {objective})"
    )]
    IterationLimit {
        iterations: u64,
        gap: f64,
        objective: f64,
    },

    #[error("fold {fold}: training split lost a class")]
    DegenerateFold { fold: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        source_name: impl Into<String>,
        location: impl ToString,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            location: location.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of the filesystem rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
