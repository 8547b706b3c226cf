use std::path::PathBuf;

/// Errors produced by the fusion pipeline and its file formats.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ensemble has no snapshots")]
    EmptyEnsemble,

    #[error("mask has {mask} bits but the ensemble has {ensemble} snapshots")]
    MaskLengthMismatch { mask: usize, ensemble: usize },

    #[error("no (prediction, reference) pairs to evaluate")]
    EmptyInput,

    #[error("{path}:{line}: expected {expected} hypotheses, found {found}")]
    RaggedEnsemble {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },

    #[error("{0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            message: message.into(),
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
