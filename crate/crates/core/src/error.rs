use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),
    #[error("the identity element has no {0}")]
    Identity(&'static str),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("invalid leaf: both rays are equal")]
    InvalidLeaf,
    #[error("automorphism is not invertible: {0}")]
    NonInvertible(String),
    #[error("matrix is not primitive")]
    NotPrimitive,
    #[error("degenerate tree: {0}")]
    DegenerateTree(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("ray is not in L1(T)")]
    NotInL1,
    #[error("operation unsupported on this model: {0}")]
    Unsupported(&'static str),
    #[error("io error: {0}")]
    Io(String),
}

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

pub type Result<T> = std::result::Result<T, Error>;
