use std::path::PathBuf;

/// Errors produced anywhere in the augmentation / search pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A lexicon or stopword file line could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A dataset file could not be ingested.
    #[error("ingestion error at {location}: {message}")]
    Ingestion { location: String, message: String },

    /// Training diverged or otherwise failed.
    #[error("training error in epoch {epoch}: {message}")]
    Training { epoch: usize, message: String },

    /// A model checkpoint or config file has an unexpected layout.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by malformed input files rather than runtime failures.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Ingestion { .. }
                | Error::Format(_)
                | Error::Io { .. }
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
