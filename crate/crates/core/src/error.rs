use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation has no implementation for this parameter regime.
    #[error("unsupported mode: {0}")]
    Unsupported(String),

    /// An iterative numerical routine failed.
    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        /// Dump of the offending input, for reproduction.
        dump: String,
    },

    /// A quantity that is non-negative for admissible input came out negative.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
