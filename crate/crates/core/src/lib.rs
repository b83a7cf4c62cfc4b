//! Piecewise affine maps (PAMs) with one jump and the three-timescale
//! slow-fast vector fields whose return maps realise them.
//!
//! * [`pam`]: iteration, LAO/SAO signatures and parameter bounds for PAMs.
//! * [`family`]: the canonical vector-field family and its critical manifold.
//! * [`assoc`]: the PAM associated to a member of the family.
//! * [`synthesis`]: the inverse problem, PAM to vector field.
//! * [`crossover`]: sweeps between two synthesized fields.
//! * [`tables`]: reference data used by the verification commands.

pub mod assoc;
pub mod crossover;
pub mod error;
pub mod family;
pub mod numeric;
pub mod pam;
pub mod scalar;
pub mod synthesis;
pub mod tables;

pub use error::{Error, Result};
pub use family::{CanonicalField, CanonicalParams, ManifoldGeometry, RhoSpec};
pub use pam::{PamCoefficients, Signature, TransformedPam};
pub use scalar::Real;

pub type Pam = PamCoefficients<f64>;
pub type Pam32 = PamCoefficients<f32>;
pub type Params = CanonicalParams<f64>;
pub type Params32 = CanonicalParams<f32>;
pub type Geometry = ManifoldGeometry<f64>;
pub type Rho = RhoSpec<f64>;
pub type Field = CanonicalField<f64>;
