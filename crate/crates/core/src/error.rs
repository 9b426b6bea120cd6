use thiserror::Error;

/// Coarse classification of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed textual input (numbers, JSON fields).
    Parse,
    /// Input parsed but violates a documented precondition.
    Precondition,
    /// A bounded search ran out of budget.
    BudgetExhausted,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot combine values from Q(sqrt({left})) and Q(sqrt({right}))")]
    MixedRadicands { left: u64, right: u64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid normal form: {}", .0.join("; "))]
    InvalidNormalForm(Vec<String>),

    #[error("invalid geodesic model: {0}")]
    InvalidModel(String),

    #[error("formula applies to {expected} geodesics only")]
    WrongFormula { expected: &'static str },

    #[error("mean index must be positive, got {0}")]
    NonPositiveMeanIndex(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("row {0} of the coefficient matrix is zero")]
    ZeroRow(usize),

    #[error("value {value} lies on a dividing point of the interval pattern")]
    BoundaryHit { value: String },

    #[error("effective difference number is 0; the system cannot satisfy both sum conditions")]
    ZeroEffectiveDifference,

    #[error("scan budget of {budget} exhausted after {scanned} iterates")]
    BudgetExhausted { budget: u64, scanned: u64 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) => ErrorKind::Parse,
            Error::BudgetExhausted { .. } => ErrorKind::BudgetExhausted,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
