use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("division by the zero monomial")]
    DivisionByZero,
    #[error("logarithm of a nonpositive value: {0}")]
    NonPositive(String),
    #[error("(n, k) = ({n}, {k}) is not covered by the explicit bound")]
    NotCovered { n: i64, k: i64 },
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
