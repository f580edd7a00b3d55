use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input: bad parameter, missing or unknown key, inconsistent geometry.
    #[error("configuration error ({key}): {message}")]
    Config { key: String, message: String },

    /// Caller broke an operation's precondition (e.g. probing a boundary index).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Non-finite amplitude produced during time stepping.
    #[error("numeric failure at step {step}: non-finite amplitude at lattice index {index}")]
    NonFinite { step: usize, index: usize },

    /// Tridiagonal elimination hit a vanishing pivot.
    #[error("numeric failure at step {step}: vanishing pivot in row {row}")]
    SingularPivot { step: usize, row: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for the failures that the CLI reports with exit code 2.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonFinite { .. } | Error::SingularPivot { .. })
    }

    /// Step index attached to a numeric failure.
    pub fn failed_step(&self) -> Option<usize> {
        match self {
            Error::NonFinite { step, .. } | Error::SingularPivot { step, .. } => Some(*step),
            _ => None,
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            Error::NonFinite { index, .. } => Error::NonFinite { step, index },
            Error::SingularPivot { row, .. } => Error::SingularPivot { step, row },
            other => other,
        }
    }
}
