use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("unknown index `{0}`")]
    UnknownIndex(String),
    #[error("unknown shape `{0}`")]
    UnknownShape(String),
    #[error("size limit exceeded: {what} has {actual}, limit is {limit}")]
    SizeLimit {
        what: String,
        actual: usize,
        limit: usize,
    },
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("invalid container: {0}")]
    InvalidContainer(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("index sets do not match: {0}")]
    IndexMismatch(String),
    #[error("point `{0}` is not isolated")]
    NotIsolated(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("depth bound {0} exceeded")]
    DepthExceeded(usize),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
