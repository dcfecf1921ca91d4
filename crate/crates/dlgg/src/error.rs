use std::fmt;

/// Errors produced by the estimator library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A function argument was outside its domain.
    InvalidArgument(String),
    /// A matrix expected to be positive definite was not (failed pivot index).
    NotPositiveDefinite { pivot: usize },
    /// A matrix expected to be positive semi-definite was not.
    NotPositiveSemiDefinite { pivot: usize },
    /// Chain or sampler configuration is inconsistent.
    InvalidConfig(String),
    /// Structured input data violated a contract (row/column locations are 1-based).
    BadData(String),
    /// File or stream level failure.
    Io(String),
    /// A file had the wrong format (magic bytes, version, truncation, ...).
    BadFormat(String),
    /// A Gibbs sweep failed; carries the sweep index and a state summary.
    SweepFailed { sweep: usize, detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot} <= 0)")
            }
            Error::NotPositiveSemiDefinite { pivot } => {
                write!(f, "matrix is not positive semi-definite (pivot {pivot} < 0)")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::BadData(msg) => write!(f, "bad data: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
            Error::BadFormat(msg) => write!(f, "bad file format: {msg}"),
            Error::SweepFailed { sweep, detail } => {
                write!(f, "gibbs sweep {sweep} failed: {detail}")
            }
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
