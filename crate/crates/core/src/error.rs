use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("breakpoints must be finite and strictly increasing (index {0})")]
    Breakpoints(usize),
    #[error("expected {expected} layer values, got {got}")]
    LayerCount { expected: usize, got: usize },
    #[error("layer value {0} is not finite")]
    NonFiniteValue(usize),
    #[error("exponent p = {0} out of range ({1})")]
    Exponent(f64, &'static str),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("interval set is empty")]
    EmptySet,
    #[error("ratio undefined for f = 0")]
    ZeroPotential,
    #[error("{path}: {msg}")]
    Input { path: String, msg: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
