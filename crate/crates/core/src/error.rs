use thiserror::Error;

/// Errors raised by the arithmetic, height and scattering routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("polynomial is not monic")]
    NonMonic,
    #[error("polynomial is reducible over Q")]
    Reducible,
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different number fields")]
    FieldMismatch,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("unsupported ramification: p = {0} divides the polynomial discriminant of a non-quadratic field")]
    UnsupportedRamification(u64),
    #[error("point lies on the support of a linear form")]
    OnSupport,
    #[error("every linear form vanishes at place {0}")]
    AllFormsVanish(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("weight threshold not met: sum of d-weights {sum} <= n + 1 = {bound}")]
    ThresholdNotMet { sum: String, bound: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("weight sum check failed: sum of e-weights {sum} <= n + 1 = {bound}")]
    SumCheckFailed { sum: String, bound: usize },
    #[error("general position violated at place {place}: forms {indices:?} are linearly dependent")]
    GeneralPositionViolated { place: usize, indices: Vec<usize> },
    #[error("enumeration budget exceeded: more than {0} points")]
    BudgetExceeded(usize),
    #[error("infeasible cover: {0}")]
    Infeasible(String),
    #[error("no tuples in the weight simplex")]
    EmptyDelta,
}

pub type Result<T> = std::result::Result<T, Error>;
