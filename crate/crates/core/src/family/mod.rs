//! The canonical family of slow-fast vector fields
//!
//! ```text
//! ε x' = y - F(x, z)
//!   y' = J(x) = 1/2 - x
//!   z' = δ G(x) + (z - z0) H(x)
//! ```
//!
//! with a fixed degree-9 critical manifold `F`, `Q(x) = ∫₀ˣ ρ F_s ds`,
//! `H = ρ (αQ + β) J` and `G = [κ + λ (αQ²/2 + βQ)] H`.

mod field;
pub mod manifold;
mod primitive;
mod rho;

pub use field::{CanonicalField, CanonicalParams, FOLD_TOL};
pub use manifold::{CriticalManifold, ManifoldGeometry};
pub use primitive::{q_quad_options, Primitive};
pub use rho::{rational_denominator, Rho, RhoSpec, RHO_DOMAIN};

use crate::error::Result;
use crate::scalar::Real;

/// Fold geometry of the `z0` slice.
pub fn compute_geometry<T: Real>(params: &CanonicalParams<T>) -> Result<ManifoldGeometry<T>> {
    CriticalManifold::new().geometry(params.z0)
}
