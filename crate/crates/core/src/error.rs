use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the kernels.
///
/// The variants map onto the exit codes of the command-line tool: malformed
/// input is a usage error, a violated precondition is a kernel refusal and an
/// inconsistency flags a mathematical situation the construction excludes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("undefined value-group operation: {0}")]
    Undefined(&'static str),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
}

impl Error {
    pub fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn inconsistency(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }
}
