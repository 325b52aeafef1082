use thiserror::Error;

/// Errors raised by configuration, scheme construction and verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid network configuration: {0}")]
    InvalidConfig(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("sizing error: {0}")]
    Sizing(String),

    #[error("bit length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("demand {demand} of user {user} is outside 1..={files}")]
    DemandOutOfRange {
        user: usize,
        demand: usize,
        files: usize,
    },

    #[error("memory {memory} is outside the scheme's regime: {reason}")]
    MemoryRegime { memory: String, reason: String },

    #[error("not a private set for user {user}: {reason}")]
    InvalidPrivateSet { user: usize, reason: String },

    #[error("condition C1 violated: caches {a} and {b} accessible to user {user} share content")]
    ConditionC1 { user: usize, a: usize, b: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("AIR search exhausted for K={k}, L={l}")]
    AirSearchExhausted { k: usize, l: usize },

    #[error("unsupported by this scheme: {0}")]
    Unsupported(String),

    #[error("decode failure: {0}")]
    Decode(String),

    #[error("measured cost differs from the declared value: {0}")]
    Accounting(String),

    #[error("enumeration budget exceeded: {required} evaluations required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
