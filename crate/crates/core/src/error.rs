use thiserror::Error;

/// Errors raised by the toolkit. Positions are 1-based `(row, column)`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial is not divisible")]
    NotDivisible,
    #[error("leading coefficient of divisor is not a unit")]
    NonUnitLeading,
    #[error("valuation indeterminate: element vanishes below precision {0}")]
    IndeterminateValuation(usize),
    #[error("series is not topologically nilpotent (needs positive valuation)")]
    NotTopologicallyNilpotent,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no nonzero morphism between the rank-1 modules")]
    NoHom,
    #[error("bad weights: {0}")]
    BadWeights(String),
    #[error("diagonal entry ({0}, {0}) is not a nonzero monomial")]
    BadDiagonal(usize),
    #[error("matrix is not upper triangular: nonzero entry at ({0}, {1})")]
    NotUpperTriangular(usize, usize),
    #[error("height condition fails for r = {0}")]
    HeightFailed(u32),
    #[error("ambiguous split at ({row}, {col}): degree {degree} fits both the pattern and the u^p N part")]
    AmbiguousSplit { row: usize, col: usize, degree: usize },
    #[error("dimension {0} too large (limit {1})")]
    DimensionTooLarge(usize, usize),
    #[error("hypothesis violated at ({0}, {1}): f_ij must vanish when t_i > t_j")]
    HypothesisViolated(usize, usize),
    #[error("linear system over budget: {0} unknowns (limit {1})")]
    BudgetExceeded(usize, usize),
    #[error("insufficient precision: need {needed}, have {have}")]
    InsufficientPrecision { needed: usize, have: usize },
    #[error("consistency system has no solution")]
    NoSolution,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("characters are not generic: witness pair ({0}, {1})")]
    NotGeneric(usize, usize),
    #[error("shape validation failed with {0} diagnostic(s)")]
    ShapeViolations(usize),
    #[error("internal invariant failure: {0}")]
    Invariant(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
