use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver suite.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: hessian has {hessian} blocks, configuration has {config}")]
    DimensionMismatch { hessian: usize, config: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid swap: {0}")]
    InvalidSwap(String),

    #[error("matrix is not symmetric: |H[{i}][{j}] - H[{j}][{i}]| = {diff:e} exceeds {tol:e}")]
    NotSymmetric {
        i: usize,
        j: usize,
        diff: f64,
        tol: f64,
    },

    #[error("non-finite value in row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(
        "exact enumeration of C({n}, {m}) = {count} configurations exceeds the guard of {limit}; \
         use the anneal method or raise the guard"
    )]
    ResourceGuard {
        n: usize,
        m: usize,
        count: String,
        limit: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
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
