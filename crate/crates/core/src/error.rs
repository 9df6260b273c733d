use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure class, mapped onto process exit codes by the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Data,
    Numerical,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 1,
            ErrorKind::Data => 2,
            ErrorKind::Numerical => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Data => "data",
            ErrorKind::Numerical => "numerical",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{file}:{line}: column `{column}`: {message}")]
    Malformed {
        file: String,
        line: u64,
        column: String,
        message: String,
    },

    #[error("{file}:{line}: duplicate key `{key}`")]
    DuplicateKey { file: String, line: u64, key: String },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown country `{0}`")]
    UnknownCountry(String),

    #[error("panel is empty after dropping {dropped} incomplete pairs")]
    EmptyPanel { dropped: usize },

    #[error("{0}")]
    EmptySelection(String),

    #[error("missing prerequisite `{0}`; run the stage that produces it first")]
    MissingPrerequisite(String),

    #[error("model chain is not nested: {0}")]
    NonNested(String),

    #[error("design matrix is rank deficient (column `{column}`)")]
    RankDeficient { column: String },

    #[error("not enough observations: n = {n}, k = {k}")]
    InsufficientRows { n: usize, k: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidInput(_)
            | Error::Malformed { .. }
            | Error::DuplicateKey { .. }
            | Error::Config { .. }
            | Error::NonNested(_) => ErrorKind::Validation,
            Error::Io { .. }
            | Error::UnknownCountry(_)
            | Error::EmptyPanel { .. }
            | Error::EmptySelection(_)
            | Error::MissingPrerequisite(_) => ErrorKind::Data,
            Error::RankDeficient { .. } | Error::InsufficientRows { .. } | Error::Numerical(_) => {
                ErrorKind::Numerical
            }
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
