use thiserror::Error;

/// Errors raised by the boosting laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("measure has zero weight")]
    ZeroWeight,

    #[error("support violation at index {index}: first argument is positive where the second is zero")]
    SupportViolation { index: usize },

    #[error("invalid measure entry {value} at index {index} (entries must lie in [0, 1])")]
    InvalidMeasure { index: usize, value: f64 },

    #[error("measures have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("projection infeasible: {reason}")]
    Infeasible { reason: String },

    #[error("mean estimator failed to certify a projection constant (step {step})")]
    EstimatorFailure { step: usize },

    #[error("weight floor violated: {reason}")]
    FloorViolation { reason: String },

    #[error("size limit exceeded: {reason}")]
    SizeLimit { reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("weak learner contract violated at iteration {iteration}: advantage {advantage} < required {required}")]
    WeakLearnerContractViolation {
        iteration: usize,
        advantage: f64,
        required: f64,
    },

    #[error("bound violated at iteration {iteration}: {what} (slack {slack:e})")]
    BoundViolation {
        iteration: usize,
        what: String,
        slack: f64,
    },

    #[error("dataset error: {0}")]
    Dataset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
