use thiserror::Error;

use crate::cnf::Var;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contradictory assignment: {0} bound to both values")]
    Contradictory(Var),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("enumeration over {vars} variables exceeds the limit of {limit}")]
    LimitExceeded { vars: usize, limit: usize },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
