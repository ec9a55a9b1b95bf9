use thiserror::Error;

use crate::syntax::ParseError;
use crate::typecheck::Diagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("term error: {0}")]
    Term(String),
    #[error("{0}")]
    Type(#[from] Box<Diagnostic>),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("graph error: {}", .0.join("; "))]
    Graph(Vec<String>),
    #[error("reduction error: {0}")]
    Reduction(String),
    #[error("primitive error: {0}")]
    Prim(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<Diagnostic> for Error {
    fn from(d: Diagnostic) -> Self {
        Error::Type(Box::new(d))
    }
}
