use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported prime {0}: X_0(p) has genus zero only for p in {{2, 3, 5, 7, 13}}")]
    UnsupportedPrime(u64),

    #[error("series is zero to its working precision")]
    ZeroSeries,

    #[error("lowest exponent {lowest} is not divisible by {n}")]
    ExponentNotDivisible { lowest: i64, n: u64 },

    #[error("leading coefficient {0} is not an exact rational n-th power")]
    NotAPerfectPower(String),

    #[error("Laurent term q^{0} cannot be pushed through U")]
    LaurentNotDivisible(i64),

    #[error("weight {0} is not an even integer >= 4")]
    BadEisensteinWeight(i64),

    #[error("non-integral coefficient {value} at index {index}")]
    NonIntegral { index: String, value: String },

    #[error("residual does not vanish: first nonzero term at q^{0}")]
    NonzeroResidual(i64),

    #[error("linear system has kernel of dimension {0}, expected 1 (precision too low)")]
    KernelDimension(usize),

    #[error("oracle and generating-function matrices disagree at ({row}, {col})")]
    MethodMismatch { row: usize, col: usize },

    #[error("valuation bound violated at ({row}, {col}): {detail}")]
    BoundViolation { row: usize, col: usize, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("modular reconstruction failed: {0}")]
    Reconstruction(String),
}
