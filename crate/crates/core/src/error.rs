use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid number `{0}`")]
    Number(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("list not respected: {0}")]
    NotRespected(String),
    #[error("not a subset path: {0}")]
    NotSubsetPath(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("instance has {n} vertices, over the limit of {limit}")]
    OverLimit { n: usize, limit: usize },
    #[error("certificate `{name}` violated: {lhs} > {rhs}")]
    Certificate { name: String, lhs: String, rhs: String },
    #[error("inconsistent certificate: {0}")]
    Inconsistent(String),
    #[error("stored {what} {stored} differs from recomputed {actual}")]
    Mismatch { what: String, stored: String, actual: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
