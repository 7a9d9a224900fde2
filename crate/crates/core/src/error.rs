use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid density operator: {0}")]
    InvalidState(String),
    #[error("Bloch vector length {0} exceeds 1")]
    BlochLength(f64),
    #[error("swap angle {0} outside [0, pi/2]")]
    SwapAngle(f64),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
