use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LameError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("series did not converge: {0}")]
    NonConvergence(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("singular radicand in {0}")]
    SingularRadicand(&'static str),
    #[error("degenerate quadratic: {0}")]
    DegenerateQuadratic(String),
    #[error("pole on the integration contour: {0}")]
    PoleOnContour(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, LameError>;

pub(crate) fn invalid(msg: impl Into<String>) -> LameError {
    LameError::InvalidParameter(msg.into())
}
