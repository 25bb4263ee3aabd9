use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("group rank {0} exceeds the supported maximum of 6")]
    RankTooLarge(usize),
    #[error("group mismatch: rank {left} vs rank {right}")]
    GroupMismatch { left: usize, right: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("elements {0:?} do not form a basis of a subgroup")]
    NotASubgroup(Vec<u32>),
    #[error("vector of length {len} cannot be indexed by a group of order {order}")]
    BadLength { len: usize, order: usize },

    #[error(
        "{0} is not a positive squarefree-reducible integer > 1 (field would not be totally real)"
    )]
    NotTotallyReal(i64),
    #[error("generator {0} is a perfect square")]
    SquareGenerator(i64),
    #[error("generators are dependent modulo squares: product over bitmask {0:#b} is a square")]
    DependentGenerators(u32),
    #[error("squarefree kernel overflowed u64")]
    Overflow,
    #[error("character must be nontrivial")]
    TrivialCharacter,
    #[error("prime {0} ramifies in the field")]
    Ramified(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("place set is missing ramified primes {0:?}")]
    MissingRamified(Vec<u64>),
    #[error("{0} is not a positive fundamental discriminant")]
    NotFundamental(i64),
    #[error("zero has no square class")]
    ZeroSquareClass,
    #[error("malformed field or prime list '{0}'")]
    BadSpec(String),

    #[error("lattices are incomparable; index undefined")]
    Incomparable,
    #[error("relative degree must be 2, got {0}")]
    RelativeDegree(usize),
    #[error("operation requires a biquadratic field (m = 2), got m = {0}")]
    NotBiquadratic(usize),
    #[error(
        "annihilator did not stabilize below prime bound {bound} (last change at {last_change})"
    )]
    Unstable { bound: u64, last_change: u64 },
    #[error("falsification: {0}")]
    Falsified(String),
    #[error("w2 minus part {0} is not congruent to 2 mod 4")]
    W2Congruence(u64),

    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
