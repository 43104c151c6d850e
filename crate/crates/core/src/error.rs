use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} is not supported (expected 1, 2 or 3)")]
    InvalidDimension(usize),

    #[error("truncation degree {0} is below the minimum of 1")]
    InvalidTruncation(usize),

    #[error("requested degree {requested} exceeds the hard cap {cap}")]
    DegreeCap { requested: usize, cap: usize },

    #[error("shape mismatch: expected {expected:?}, got {found:?}")]
    ShapeMismatch { expected: Vec<usize>, found: Vec<usize> },

    #[error("operator word of order {order} exceeds the headroom {headroom}")]
    WordTooLong { order: usize, headroom: usize },

    #[error("axis {axis} out of range for dimension {d}")]
    AxisOutOfRange { axis: usize, d: usize },

    #[error("resonant tuple: mu1^2 - mu2^2 - mu3^2 - mu4^2 = 0 for {0:?}")]
    Resonant([u64; 4]),

    #[error("degree overflow: {0}")]
    DegreeOverflow(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
