use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group parameters: {0}")]
    InvalidGroup(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("root not found in [{lo}, {hi}]: {reason}")]
    RootNotFound { lo: f64, hi: f64, reason: String },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// `last_feasible` is the largest data fraction reached by continuation, if any.
    #[error("boundary data infeasible: {reason}")]
    Infeasible { reason: String, last_feasible: Option<f64> },

    #[error("prescribed height {c} exceeds the barrier cap L = {cap}")]
    HeightAboveCap { c: f64, cap: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("bisection failed: {0}")]
    Bisection(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
