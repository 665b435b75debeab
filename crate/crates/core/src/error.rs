//! Error type shared by every module in the crate.

use std::path::PathBuf;

/// Errors produced by loaders, trainers and the correction pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Filesystem trouble, annotated with the path that caused it.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A data file violated its format; `line` is 1-based.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Caller handed us something a precondition rules out.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A lookup that the caller was required to guarantee would succeed.
    #[error("no embedding for {0:?}")]
    MissingEmbedding(String),

    /// An internal consistency guarantee was broken (mismatched corpora,
    /// out-of-range indices between paired artifacts, and the like).
    #[error("contract violation: {0}")]
    Contract(String),
}

impl Error {
    /// Wrap an io error with the path it occurred on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Build a parse error for `line` (1-based) of `path`.
    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
