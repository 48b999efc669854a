use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("degree set is not closed under divisors: {1} divides {0} but is missing")]
    NotDivisorClosed(u32, u32),
    #[error("size bound exceeded: {what} needs {size}, limit {limit}")]
    SizeBound { what: String, size: u128, limit: u128 },
    #[error("zero element where a unit is required")]
    ZeroElement,
    #[error("degree {0} is not in the tower")]
    MissingDegree(u32),
    #[error("degree {to} does not divide {from}")]
    NotDivisible { from: u64, to: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not applicable: {0}")]
    Inapplicable(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("internal invariant breached: {0}")]
    InvariantBreach(String),
}

pub type Result<T> = std::result::Result<T, Error>;
