use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("costs must be sorted in non-increasing order: {0}")]
    InvalidOrder(String),

    #[error("policy violation: {0}")]
    PolicyViolation(String),

    #[error("support must be non-empty")]
    EmptySupport,

    #[error("malformed search sequence: {0}")]
    MalformedSequence(String),

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("no closed form for this instance ({0}); use `solve`")]
    NoClosedForm(String),

    #[error("state budget of {0} exceeded")]
    BudgetExceeded(usize),

    #[error("parse error: {0}")]
    Parse(String),
}
