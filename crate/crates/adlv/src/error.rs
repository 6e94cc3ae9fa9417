use thiserror::Error;

/// Errors surfaced by the library. Invariant violations are loud by design:
/// they indicate that an internally asserted identity failed, which must
/// never be papered over.
#[derive(Debug, Error)]
pub enum AdlvError {
    #[error("unsupported root datum: {0}")]
    Unsupported(String),

    #[error("element does not belong to this root datum")]
    DatumMismatch,

    #[error("dimension mismatch: expected rank {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error at `{token}`: {msg}")]
    Parse { token: String, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("budget exhausted after {used} nodes (limit {limit})")]
    BudgetExhausted { used: u64, limit: u64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AdlvError>;
