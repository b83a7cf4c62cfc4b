use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] pamflow_core::Error),

    #[error("step size underflow at t = {t} (h = {h:e}); likely a canard passage near the jump")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),

    #[error("singular iteration matrix at t = {t}")]
    SingularMatrix { t: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("output error: {0}")]
    Io(String),
}

pub type SimResult<T> = std::result::Result<T, SimError>;
