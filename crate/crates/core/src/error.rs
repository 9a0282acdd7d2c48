use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or conflicting input (files, configuration, arguments).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A theorem precondition checked before an experiment does not hold.
    #[error("gate `{gate}` failed: {detail}")]
    Gate { gate: &'static str, detail: String },

    #[error("limit exceeded: {0}")]
    Limit(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
