use thiserror::Error;

/// Errors raised by the library. The variants map one-to-one onto the CLI
/// exit codes (validity → 2, numerical/truncation → 3).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validity(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("truncation risk: {message} (try cutoff >= {suggested_cutoff})")]
    Truncation {
        message: String,
        suggested_cutoff: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validity(msg: impl Into<String>) -> Error {
    Error::Validity(msg.into())
}
