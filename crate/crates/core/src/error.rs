use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arity mismatch: function has arity {expected}, integral requested degree {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sector too large: {states} states exceeds the guard of {limit}")]
    SectorTooLarge { states: usize, limit: usize },

    #[error("empty sector: no configuration with {particles} particles fits the site capacities")]
    EmptySector { particles: usize },

    #[error("function has no closed-form integral against the reference measure: {0}")]
    Unsupported(String),

    #[error("ill-conditioned moment matrix (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("event budget of {max_events} exhausted at time {time}")]
    EventBudgetExceeded { max_events: u64, time: f64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
