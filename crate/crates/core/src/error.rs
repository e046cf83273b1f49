use thiserror::Error;

/// Errors raised by the arithmetic kernel and the pipelines built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero input where a nonzero element is required")]
    Zero,
    #[error("norm {norm} exceeds the factoring cap {cap}")]
    NormCap { norm: u128, cap: u128 },
    #[error("level {n} does not divide q - 1 = {q_minus_one} at {place}")]
    LevelNotTame { n: u64, q_minus_one: u64, place: String },
    #[error("element is not a unit at {0}")]
    NotUnit(String),
    #[error("place {place} is wild for level {n}")]
    WildPlace { place: String, n: u64 },
    #[error("{0} is a bad place for this curve")]
    BadPlace(String),
    #[error("residue field size {q} exceeds the counting cap {cap}")]
    CountingCap { q: u64, cap: u64 },
    #[error("reciprocity failure: local invariants sum to {0}")]
    Reciprocity(String),
    #[error("level structure check failed: {0}")]
    LevelStructure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("place {0} missing from extension data")]
    MissingPlace(String),
    #[error("search exhausted: {0}")]
    Exhausted(String),
    #[error("condition {condition} failed: {witness}")]
    Condition { condition: String, witness: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
