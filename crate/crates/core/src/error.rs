use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{what}, line {line}: {msg}")]
    Parse {
        what: &'static str,
        line: usize,
        msg: String,
    },

    #[error("duplicate sequence id {0}")]
    DuplicateId(String),

    #[error("unknown code value {0:?} (expected 1 or 2)")]
    UnknownCode(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("table {table:?} has no row for sequence {id}")]
    MissingId { table: String, id: String },

    #[error("text has no tokens")]
    EmptyText,

    #[error("training data needs both labels, only {0} present")]
    SingleLabel(&'static str),

    #[error("{context}: {source}")]
    Fold {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: &'static str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            what,
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn in_context(self, context: impl Into<String>) -> Self {
        Error::Fold {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by the experiment configuration rather than the data.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) => true,
            Error::Fold { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
