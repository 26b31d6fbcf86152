use thiserror::Error;

use crate::solver::SolveReport;
use crate::topology::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("topology error: {0}")]
    Topology(String),

    #[error("book validation failed: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("solver error: {0}")]
    Solver(String),

    #[error("no start converged ({} attempts)", .0.len())]
    NoConvergence(Vec<SolveReport>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("experiment error: {0}")]
    Experiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
