use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Not enough samples yet to estimate the requested derivatives.
    #[error("not ready: need {needed} samples, have {have}")]
    NotReady { needed: usize, have: usize },

    /// A tick arrived with a timestamp that does not advance the filter clock.
    #[error("clock error: tick at t={t} does not advance past t={last}")]
    Clock { t: f64, last: f64 },

    #[error("numerical degeneracy: innovation covariance condition number {cond:.3e}")]
    NumericalDegeneracy { cond: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
