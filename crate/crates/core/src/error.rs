use thiserror::Error;

/// Errors produced by the valuation, geometry and certification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("step {step}: choice index {index} out of range ({available} candidate valuations)")]
    ChoiceOutOfRange {
        step: usize,
        index: usize,
        available: usize,
    },

    #[error("step {step}: {available} candidate valuations and no choice supplied")]
    AmbiguousStep { step: usize, available: usize },

    #[error("cannot predict past a zero entry at level {0}; supply the branch explicitly")]
    ZeroBase(usize),

    #[error("branch record too short: level {needed} required, {len} entries present")]
    RecordTooShort { needed: usize, len: usize },

    #[error("inconsistent branch record: {0}")]
    InconsistentRecord(String),

    #[error("error coefficient C is absent")]
    MissingErrorCoefficient,

    #[error("level {level} is not in the stable regime: {reason}")]
    NotStable { level: usize, reason: String },

    #[error("d = {d} is divisible by p = {p}")]
    WildD { d: i64, p: u64 },

    #[error("tower invariant violated at level {level}: {property}")]
    TowerInvariant { level: usize, property: String },

    #[error("integer overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
