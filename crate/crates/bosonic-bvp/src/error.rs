//! Crate-wide error type.
//!
//! Variants are grouped by how the command-line driver maps them to exit
//! codes: configuration problems (exit 2), domain-guard violations (exit 3)
//! and budget overruns (exit 4).  Everything else is an internal invariant
//! failure and surfaces as a guard violation.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ambient dimension {m} out of range [{min}, {max}]")]
    DimensionOutOfRange { m: usize, min: usize, max: usize },

    #[error("cannot invert {what}: norm {norm:e} below threshold")]
    NearZeroInverse { what: &'static str, norm: f64 },

    #[error("multivector is not a versor: residual {residual:e}")]
    NotAVersor { residual: f64 },

    #[error("Moebius transform has a pole at the evaluation point (|cx+d| = {norm:e})")]
    Pole { norm: f64 },

    #[error("{what} violates a domain guard: {detail}")]
    GuardViolation { what: &'static str, detail: String },

    #[error("quadrature sample at node {index} ({coords:?}) is not finite")]
    NonFiniteSample { index: usize, coords: Vec<f64> },

    #[error("operator parameters m={m}, k={k} hit the degenerate denominator m+2k-4 = 0")]
    DegenerateOperator { m: usize, k: usize },

    #[error("basis expansion residual {residual:e} exceeds 1e-10; input is outside the span")]
    NotInSpan { residual: f64 },

    #[error("node budget exceeded: rule needs {needed} nodes, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON failure: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) => 2,
            Error::BudgetExceeded { .. } => 4,
            _ => 3,
        }
    }
}
