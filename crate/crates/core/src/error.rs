use thiserror::Error;

use crate::cantor::Violation;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty operand")]
    EmptyOperand,

    #[error("invalid interval: lo {lo} exceeds hi {hi}")]
    InvalidInterval { lo: String, hi: String },

    #[error("scale must be nonzero")]
    ZeroScale,

    #[error("invalid affine IFS: {0}")]
    InvalidIfs(Violation),

    #[error("gap condition violated: a - a/p0 - a/p1 = {gap} <= 0")]
    GapCondition { gap: String },

    #[error("covering budget exceeded: need {required} intervals, budget is {budget}")]
    BudgetExceeded { required: u128, budget: usize },

    #[error("not a Cantor IFS: ratio sum {0} exceeds 1")]
    NotCantor(String),

    #[error("no solution: gcd of exponents is {0}, expected 1")]
    NoSolution(u64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("{0}")]
    Config(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
