use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("vertex set mismatch: expected {expected} entries, got {got}")]
    VertexMismatch { expected: usize, got: usize },
    #[error("explicit T required")]
    ExplicitTRequired,
    #[error("zero dimension vector")]
    ZeroVector,
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at L = {0}")]
    Pole(i64),
    #[error("rigidity of T is neither asserted nor verified")]
    RigidityUnasserted,
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("gamma oracle failure: {0}")]
    GammaOracle(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} is not a prime below 2^31")]
    InvalidPrime(u64),
    #[error("weight fit failed: {0}")]
    WeightFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
