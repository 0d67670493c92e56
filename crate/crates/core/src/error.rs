use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in the field")]
    DivisionByZero,
    #[error("operands belong to different field contexts")]
    CtxMismatch,
    #[error("ratio-set denominator contains no nonzero element")]
    EmptyDenominator,
    #[error("input too small: {0}")]
    TooSmall(String),
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate polynomial: {0}")]
    Degenerate(String),
    #[error("insufficient non-degeneracy certificate: {0}")]
    InsufficientNondegeneracy(String),
    #[error("set is not forward invariant: {0}")]
    NotForwardInvariant(String),
    #[error("size imbalance: {0}")]
    SizeImbalance(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid inputs: {0}")]
    InvalidInputs(String),
    #[error("unknown check name: {0}")]
    UnknownCheckName(String),
    #[error("field construction failed: {0}")]
    FieldConstruction(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
