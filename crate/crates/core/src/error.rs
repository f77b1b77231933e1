use thiserror::Error;

/// Failures of the LP / MILP kernel.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("LP relaxation is unbounded")]
    UnboundedRelaxation,
    #[error("lazy constraint is not violated by the candidate it was returned for")]
    InvalidLazyCut,
    #[error("operation requires an optimal LP solution")]
    NotOptimal,
}

/// Failures of the min-max regret algorithms.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MmrError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("the feasible region of the instance is empty")]
    Infeasible,
    #[error("solution violates constraint {row}")]
    InfeasibleSolution { row: usize },
    #[error("solution has {got} entries, instance has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("time limit reached before a solution was available")]
    TimeLimit,
    #[error("instance has {n} variables; enumeration is limited to {max}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}
