use thiserror::Error;

/// Errors produced by the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e}); project it with psd::project_psd_maxnorm first")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("CLIME column {column} is infeasible at lambda = {lambda}; smallest feasible lambda is {min_feasible:.6}")]
    Infeasible {
        column: usize,
        lambda: f64,
        min_feasible: f64,
    },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
