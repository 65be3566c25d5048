use thiserror::Error;

/// Errors raised by backends, the Hodge engine and the extension loop.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid backend parameters: {0}")]
    InvalidParameters(String),

    #[error("form belongs to backend #{found}, expected backend #{expected}")]
    BackendMismatch { expected: u64, found: u64 },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i32, found: i32 },

    #[error("coefficient vector has length {found}, degree {degree} needs {expected}")]
    LengthMismatch {
        degree: i32,
        expected: usize,
        found: usize,
    },

    #[error("{operation} on degree {degree} exceeds the truncation (needs z-degree {needed}, have {available})")]
    TruncationExceeded {
        operation: &'static str,
        degree: i32,
        needed: usize,
        available: usize,
    },

    #[error("generator index {index} is not bound (rank {rank})")]
    UnboundGenerator { index: usize, rank: usize },

    #[error("invalid generator spec: {0}")]
    InvalidGenerators(String),

    #[error("element is not homogeneous: term of total degree {found}, expected {expected}")]
    NotHomogeneous { expected: i32, found: i32 },

    #[error("form is not closed (|d alpha| = {residual:e})")]
    NotClosed { residual: f64 },

    #[error("obstruction detected at stage {stage}: harmonic residual {residual:e}")]
    ObstructionDetected { stage: usize, residual: f64 },

    #[error("partial extension precondition fails at term a_{index}")]
    PreconditionViolated { index: usize },

    #[error("Green's operator solve did not converge: relative residual {residual:e} after {iterations} iterations")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("operation not supported by this backend: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
