use std::io;

/// Errors produced by the consensus pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    /// Input data violates a structural requirement (ragged rows, missing
    /// labels, mismatched lengths, malformed files).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A caller-supplied parameter is out of range for the data at hand.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A dense object-level structure would exceed its configured size cap.
    #[error("{what}: size {size} exceeds the configured cap of {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    /// A numerical invariant failed (zero trajectory norm, failed
    /// eigendecomposition, non-finite values).
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(e) => Error::Io(e),
                _ => unreachable!(),
            }
        } else {
            Error::InvalidInput(err.to_string())
        }
    }
}
