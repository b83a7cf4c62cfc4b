use std::fmt;
use std::process::ExitCode;

use pamflow_core::Error as CoreError;
use pamflow_sim::SimError;

/// Failure of a command, classified by exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Inconclusive(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Other(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Inconclusive(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Inconclusive(m) => write!(f, "inconclusive: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::DiscontinuityHit(_)
            | CoreError::Domain(_)
            | CoreError::SingularSystem(_)
            | CoreError::FoldPointEvaluation { .. }
            | CoreError::GeometryFailure(_)
            | CoreError::InvalidRho(_) => CliError::Domain(msg),
            CoreError::NotPeriodic => CliError::Inconclusive(msg),
            CoreError::InvalidSignature(_) => CliError::Usage(msg),
            _ => CliError::Other(msg),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Core(c) => c.into(),
            SimError::InvalidConfig(m) => CliError::Usage(m),
            SimError::StepSizeUnderflow { .. } | SimError::SingularMatrix { .. } => CliError::Domain(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("JSON: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
