use thiserror::Error;

/// Errors produced while building or analyzing patterns.
///
/// Outcomes such as "not primitive" are values, never errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} is outside [1, {dim}]")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("tuple has length {found}, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid shape: {0}")]
    BadShape(String),

    #[error("invalid limit: {0}")]
    BadLimit(String),

    #[error("set family is empty")]
    EmptyFamily,

    #[error("computation too large: {0}")]
    TooLarge(String),

    #[error("k = {k} is outside [1, {max}]")]
    KOutOfRange { k: usize, max: usize },

    #[error("t = {t} is outside [1, {max}]")]
    TOutOfRange { t: usize, max: usize },

    #[error("construction self-check failed: {0}")]
    SelfCheckFailed(String),

    #[error("order {order} is too small; need at least {min}")]
    OrderTooSmall { order: usize, min: usize },

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("pattern space with {bits} entry positions is too large to enumerate (max {max})")]
    SpaceTooLarge { bits: usize, max: usize },

    #[error("malformed pattern JSON: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    BadArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
