use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] purity_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Validation(String),
    #[error("solvers disagree on instance {n}/{sample}: spread {spread:e} (repro: {repro})")]
    SolverDisagreement {
        n: usize,
        sample: usize,
        spread: f64,
        repro: String,
    },
    #[error("x values must contain at least degree + 1 distinct points")]
    DegenerateDesign,
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit code: 2 infeasible input, 3 validation, 4 disagreement.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(purity_core::Error::Infeasible { .. }) => 2,
            CliError::Core(purity_core::Error::OracleViolation { .. }) | CliError::SolverDisagreement { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
