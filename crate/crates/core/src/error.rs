use thiserror::Error;

use crate::feasibility::FeasibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("invalid cost: {0}")]
    InvalidCost(String),

    #[error("game is {rows}x{cols}, exceeding the enumeration limit of {max_dim}")]
    DimensionTooLarge {
        rows: usize,
        cols: usize,
        max_dim: usize,
    },

    #[error("supports have unequal sizes ({rows} rows vs {cols} columns)")]
    UnequalSupports { rows: usize, cols: usize },

    #[error("infeasible request: {0}")]
    InfeasibleRequest(FeasibilityReport),

    #[error("certificate still invalid after {attempts} perturbation draws: {detail}")]
    CertificationFailure { attempts: usize, detail: String },

    #[error("LP solver failure: {0}")]
    SolverFailure(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}
