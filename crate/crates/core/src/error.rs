use thiserror::Error;

/// Errors raised across the library. Incomplete factorizations and inconclusive
/// criteria are ordinary results, not errors; these variants cover contract
/// violations and operations that genuinely cannot proceed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("factorization of {0} is incomplete")]
    IncompleteFactorization(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd of two zero polynomials is undefined")]
    UndefinedGcd,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial does not divide x^{n}-1")]
    NotADivisor { n: usize },
    #[error("x^{n}-1 has no monic divisor of degree {k}")]
    NoDegreeKDivisor { n: usize, k: usize },
    #[error("more than {limit} divisors to enumerate")]
    TooManyDivisors { limit: usize },
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("m = {0} does not divide q^n-1")]
    InvalidM(String),
    #[error("g does not divide x^n-1")]
    InvalidG,
    #[error("r = {0} does not divide q^n-1")]
    InvalidR(String),
    #[error("k = {k} is out of range for n = {n}")]
    InvalidK { n: usize, k: usize },
    #[error("element is not normal")]
    NotNormal,
    #[error("element is not primitive")]
    NotPrimitive,
    #[error("field of size {size} exceeds the exhaustive bound {bound}")]
    FieldTooLarge { size: String, bound: String },
    #[error("prime window upper end {upper} exceeds sieve capacity {capacity}")]
    WindowTooLarge { upper: String, capacity: u64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("elements belong to different towers or have the wrong shape")]
    ShapeMismatch,
    #[error("no witness found within a budget of {budget} candidates")]
    NotFound { budget: u64 },
    #[error("witness verification failed: {0}")]
    InvalidWitness(String),
    #[error("factor table line {line}: {reason}")]
    FactorTable { line: usize, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
