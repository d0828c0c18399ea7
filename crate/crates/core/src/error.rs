use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not converge (partial value {partial})")]
    Precision { partial: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("insufficient smoothness: need p >= {required}, have p = {available}")]
    Smoothness { required: u32, available: u32 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index out of range: {0}")]
    Index(String),
    #[error("infinite norm: {0}")]
    InfiniteNorm(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature budget exceeded (estimate {value}, error {error})")]
    QuadratureBudget { value: f64, error: f64 },
    #[error("{bad} of {total} Monte Carlo samples were not finite")]
    NonFinite { bad: usize, total: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
