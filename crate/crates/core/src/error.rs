use std::io;

use thiserror::Error;

use crate::qp::DualSolution;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum SvmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid kernel spec `{0}`")]
    KernelSpec(String),

    #[error("training data must contain both classes (-1 and +1)")]
    SingleClass,

    #[error("class {0} has no samples")]
    EmptyClass(String),

    #[error("invalid label {0}")]
    InvalidLabel(String),

    #[error(
        "iteration budget exhausted after {iterations} iterations (residual KKT violation {violation:e})"
    )]
    IterationLimit {
        iterations: u64,
        violation: f64,
        best: Box<DualSolution>,
    },

    #[error("brute-force oracle supports at most {max} variables, got {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("degenerate fit: no support vectors")]
    DegenerateFit,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("replication {replication} (seed {seed}): {source}")]
    Replication {
        replication: usize,
        seed: u64,
        source: Box<SvmError>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = SvmError> = std::result::Result<T, E>;
