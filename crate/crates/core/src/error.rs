use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("Cayley table is not a Latin square: {0}")]
    NotLatinSquare(String),

    #[error("identity must be at index 0: {0}")]
    IdentityNotFirst(String),

    #[error("associativity fails for ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),

    #[error("unknown catalog group {0:?}")]
    UnknownCatalog(String),

    #[error("generator closure exceeds max order {0}")]
    OrderCapExceeded(usize),

    #[error("operation needs at most {max} elements, got {got}")]
    TooLarge { got: usize, max: usize },

    #[error("{0} is not prime")]
    NotPrime(usize),

    #[error("{p} does not divide the group order {order}")]
    PrimeNotDivisor { p: usize, order: usize },

    #[error("set is not a subrack")]
    NotSubrack,

    #[error("subset is not a normal subgroup")]
    NotNormal,

    #[error("rack axiom {0} fails")]
    RackAxiom(&'static str),

    #[error("lattice element count exceeds cap {0}")]
    CapExceeded(usize),

    #[error("{0} is only available in implicit mode")]
    ImplicitOnly(String),

    #[error("interval rack of size {got} exceeds enumeration cap {cap}")]
    IntervalTooLarge { got: usize, cap: usize },

    #[error("group has a nontrivial center; apply the hypercenter quotient first")]
    NotCenterless,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cycle form condition not met")]
    ConditionNotMet,

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
