use std::path::PathBuf;

/// Errors raised while parsing corpora, validating parameters or fitting models.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("corpus has no non-empty documents")]
    EmptyCorpus,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("cannot sample from weights: {0}")]
    Sampling(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("corpus lacks required structure: {0}")]
    MissingStructure(&'static str),

    #[error("word {word} occurs in no document")]
    UnseenWord { word: String },

    #[error("unknown encoding label {0:?}")]
    UnknownEncoding(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
