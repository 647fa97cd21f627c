use thiserror::Error;

pub type Result<T, E = BackflowError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackflowError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver failed to converge for eigenvalue {index} after {iterations} iterations (off-diagonal {off_diagonal:.3e})")]
    ConvergenceFailure {
        index: usize,
        iterations: usize,
        off_diagonal: f64,
    },

    #[error("unstable configuration: norm grew by {growth:.3e} at step {step}")]
    UnstableConfiguration { step: usize, growth: f64 },

    #[error("aliasing: {mass:.3e} of the momentum mass lies near the grid Nyquist momentum")]
    Aliasing { mass: f64 },

    #[error("insufficient history: trace spans {span:.4} but {required:.4} is needed for V0 = {v0}")]
    InsufficientHistory { span: f64, required: f64, v0: f64 },
}

pub(crate) fn invalid(msg: impl Into<String>) -> BackflowError {
    BackflowError::InvalidArgument(msg.into())
}
