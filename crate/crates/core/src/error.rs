use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcmError {
    #[error("invalid priority vector: {0}")]
    InvalidVector(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("n >= 3 required (got n = {0})")]
    TooSmall(usize),

    #[error("{measure} is not defined for nonreciprocal matrices; use A(LTI) or CM(LTI2) instead")]
    NotDefinedForArbitrary { measure: &'static str },

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        last_iterate: Vec<f64>,
    },

    #[error("{method} optimizer failed: {reason}")]
    OptimizerFailed {
        method: &'static str,
        reason: String,
        best_iterate: Vec<f64>,
    },

    #[error("statistic undefined: {0}")]
    Undefined(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid perturbation model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {field}: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("degenerate binning: {0}")]
    DegenerateBins(String),

    #[error("simulation aborted: {0}")]
    SimulationAborted(String),
}

impl PcmError {
    /// True for failures of a numerical routine (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            PcmError::NoConvergence { .. }
                | PcmError::OptimizerFailed { .. }
                | PcmError::SimulationAborted(_)
        )
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        PcmError::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, PcmError>;
