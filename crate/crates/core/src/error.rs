use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computation would exceed its enumeration budget.
    #[error("size error: {what} is {actual}, limit is {limit}")]
    Size { what: &'static str, actual: usize, limit: usize },
    /// A structurally invalid parameter (empty list, zero count, mismatched grid).
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
