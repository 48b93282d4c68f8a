use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (index, helper
    /// count, dimension).
    #[error("domain error: {0}")]
    Domain(String),

    /// Input was well formed but breaks a model invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Structured text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An exhaustive search was refused because its space is too large.
    #[error("search space of {size} candidates exceeds the limit of {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
