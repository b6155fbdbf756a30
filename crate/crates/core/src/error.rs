use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("modulus is reducible over F_{p}")]
    Reducible { p: u32 },
    #[error("field too large: {p}^{degree}")]
    FieldTooLarge { p: u32, degree: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("element {0} does not belong to the field")]
    NotInField(u32),
    #[error("invalid embedding: {0}")]
    BadEmbedding(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("block ranks disagree across blocks: {0:?}")]
    BlockRankMismatch(Vec<usize>),
    #[error("not quasi-cyclic: {0}")]
    NotQuasiCyclic(String),
    #[error("not a primitive {m}-th root of unity: {reason}")]
    NotPrimitiveRoot { m: usize, reason: String },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("enumeration budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("decoding failure: {0}")]
    DecodingFailure(String),
    #[error("key equation admits {0} locator solutions within the decoding radius")]
    AmbiguousLocator(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
