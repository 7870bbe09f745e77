use thiserror::Error;

/// Errors produced by the codec library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{a} has no inverse modulo {m}")]
    NoInverse { a: u64, m: u64 },

    #[error("sample {index} = {value} is outside the recoverable range [{low}, {high})")]
    AmplitudeOutOfRange {
        index: usize,
        value: f64,
        low: f64,
        high: f64,
    },

    #[error("malformed stream at byte {offset}: {reason}")]
    MalformedStream { offset: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
