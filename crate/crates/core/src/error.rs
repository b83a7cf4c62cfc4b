use thiserror::Error;

/// Errors raised by the map, vector-field and synthesis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("iterate hit the discontinuity of the map (|Z| = {0:e})")]
    DiscontinuityHit(f64),

    #[error("orbit did not settle onto a periodic cycle")]
    NotPeriodic,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("adaptive quadrature failed: error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    #[error("p(x), q(x) requested at a fold point (x = {x}, |F_x| = {fx:e})")]
    FoldPointEvaluation { x: f64, fx: f64 },

    #[error("critical manifold geometry extraction failed: {0}")]
    GeometryFailure(String),

    #[error("closed-form and quadrature segment maps disagree (relative deviation {deviation:e})")]
    MethodMismatch { deviation: f64 },

    #[error("singular linear system (determinant {0:e})")]
    SingularSystem(f64),

    #[error("synthesized vector field does not reproduce the target map (relative residual {0:e})")]
    SynthesisVerificationFailure(f64),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid rho function: {0}")]
    InvalidRho(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
