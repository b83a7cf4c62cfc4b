//! Piecewise affine maps with a single jump at `Z = 0`.
//!
//! The map is
//!
//! ```text
//! M(Z) = a11 Z + a12   for Z < 0   (large-amplitude branch)
//!        a21 Z + a22   for Z > 0   (small-amplitude branch)
//! ```
//!
//! with strictly positive slopes. Iterates with `Z < 0` count as large-amplitude
//! oscillations (LAOs), iterates with `Z > 0` as small-amplitude ones (SAOs).

mod bounds;
mod orbit;
mod signature;

pub use bounds::{atmost_atleast_bounds, LaoBounds, MuInterval, SaoBounds};
pub use orbit::{detect_signature, find_cycle, iterate_orbit, OrbitOptions, OrbitResult};
pub use signature::Signature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Iterates with `|Z|` at or below this value are treated as hitting the jump.
pub const DISCONTINUITY_GUARD: f64 = 1e-12;

/// Coefficients `(a11, a12, a21, a22)` of a two-branch piecewise affine map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PamCoefficients<T> {
    pub a11: T,
    pub a12: T,
    pub a21: T,
    pub a22: T,
}

impl<T: Real> PamCoefficients<T> {
    /// Builds a map, rejecting non-positive or non-finite slopes.
    pub fn new(a11: T, a12: T, a21: T, a22: T) -> Result<Self> {
        let pam = Self { a11, a12, a21, a22 };
        pam.validate()?;
        Ok(pam)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("map coefficients must be finite".into()));
        }
        if !(self.a11 > T::zero() && self.a21 > T::zero()) {
            return Err(Error::Domain(format!(
                "slopes must be strictly positive (a11 = {}, a21 = {})",
                self.a11, self.a21
            )));
        }
        Ok(())
    }

    /// Evaluates the map. `Z` within [`DISCONTINUITY_GUARD`] of zero is rejected.
    #[inline]
    pub fn eval(&self, z: T) -> Result<T> {
        if z.abs() <= T::lit(DISCONTINUITY_GUARD) {
            return Err(Error::DiscontinuityHit(z.as_f64()));
        }
        Ok(if z < T::zero() {
            self.a11 * z + self.a12
        } else {
            self.a21 * z + self.a22
        })
    }

    pub fn transform(&self) -> TransformedPam<T> {
        TransformedPam {
            a: self.a11,
            b: self.a21,
            mu: self.a12,
            l: self.a22 - self.a12,
        }
    }

    /// Contraction factor `a11^L a21^s` accumulated over one period of `sig`.
    pub fn stability_factor(&self, sig: &Signature) -> T {
        let (lao, sao) = sig.totals();
        self.a11.powi(lao as i32) * self.a21.powi(sao as i32)
    }

    /// Fixed point of the LAO branch, if it lies on that branch.
    pub fn lao_fixed_point(&self) -> Option<T> {
        let one = T::one();
        if self.a11 == one {
            return None;
        }
        let z = self.a12 / (one - self.a11);
        (z < T::zero()).then_some(z)
    }

    /// Fixed point of the SAO branch, if it lies on that branch.
    pub fn sao_fixed_point(&self) -> Option<T> {
        let one = T::one();
        if self.a21 == one {
            return None;
        }
        let z = self.a22 / (one - self.a21);
        (z > T::zero()).then_some(z)
    }
}

/// Free-function form of [`PamCoefficients::eval`].
pub fn pam_eval<T: Real>(pam: &PamCoefficients<T>, z: T) -> Result<T> {
    pam.eval(z)
}

/// Free-function form of [`PamCoefficients::stability_factor`].
pub fn stability_factor<T: Real>(pam: &PamCoefficients<T>, sig: &Signature) -> T {
    pam.stability_factor(sig)
}

/// The map in the `(a, b, mu, l)` normal form used by the counting bounds:
/// `M(Z) = aZ + mu` for `Z < 0` and `bZ + mu + l` for `Z > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformedPam<T> {
    pub a: T,
    pub b: T,
    pub mu: T,
    pub l: T,
}

impl<T: Real> TransformedPam<T> {
    pub fn to_pam(&self) -> PamCoefficients<T> {
        PamCoefficients {
            a11: self.a,
            a12: self.mu,
            a21: self.b,
            a22: self.mu + self.l,
        }
    }

    /// `0 < a, b < 1` and `l < 0`; required by the counting bounds.
    pub fn check_bounds_domain(&self) -> Result<()> {
        let (zero, one) = (T::zero(), T::one());
        if !(self.a > zero && self.a < one) {
            return Err(Error::Domain(format!("a = {} outside (0, 1)", self.a)));
        }
        if !(self.b > zero && self.b < one) {
            return Err(Error::Domain(format!("b = {} outside (0, 1)", self.b)));
        }
        if !(self.l < zero) {
            return Err(Error::Domain(format!("jump height l = {} must be negative", self.l)));
        }
        Ok(())
    }

    /// `0 < mu < -l`: no fixed points, periodic orbits possible.
    pub fn mu_admissible(&self) -> bool {
        self.mu > T::zero() && self.mu < -self.l
    }
}

pub fn transform<T: Real>(pam: &PamCoefficients<T>) -> TransformedPam<T> {
    pam.transform()
}

/// `f64` map coefficients.
pub type Pam = PamCoefficients<f64>;

#[cfg(test)]
mod tests {
    use super::*;

    fn pam(a11: f64, a12: f64, a21: f64, a22: f64) -> Pam {
        Pam::new(a11, a12, a21, a22).unwrap()
    }

    #[test]
    fn eval_branches() {
        let m = pam(0.3, 1.0, 0.9, -2.0);
        assert!((m.eval(-1.0).unwrap() - 0.7).abs() < 1e-15);
        assert!((m.eval(1.0).unwrap() + 1.1).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_jump_point() {
        let m = pam(0.3, 1.0, 0.9, -2.0);
        assert!(matches!(m.eval(0.0), Err(Error::DiscontinuityHit(_))));
        assert!(matches!(m.eval(5e-13), Err(Error::DiscontinuityHit(_))));
        assert!(m.eval(2e-12).is_ok());
    }

    #[test]
    fn rejects_nonpositive_slopes() {
        assert!(Pam::new(0.0, 1.0, 0.5, 1.0).is_err());
        assert!(Pam::new(0.5, 1.0, -0.5, 1.0).is_err());
        assert!(Pam::new(f64::NAN, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn transform_examples() {
        let t = pam(0.3, 3.0, 0.9, -2.0).transform();
        assert_eq!((t.a, t.b, t.mu, t.l), (0.3, 0.9, 3.0, -5.0));
        let t = pam(1.0, 0.0, 1.0, 0.0).transform();
        assert_eq!((t.a, t.b, t.mu, t.l), (1.0, 1.0, 0.0, 0.0));
        let t = pam(0.9, 2.2, 0.8, -5.0).transform();
        assert_eq!((t.a, t.b, t.mu), (0.9, 0.8, 2.2));
        assert!((t.l + 7.2).abs() < 1e-15);
    }

    #[test]
    fn stability_factor_examples() {
        let sig: Signature = "1^3".parse().unwrap();
        let m = pam(0.3, 7.0, 0.9, -2.0);
        assert!((m.stability_factor(&sig) - 0.2187).abs() < 1e-15);
        let m = pam(1.0, 7.0, 1.0, -2.0);
        assert_eq!(m.stability_factor(&"2^1 1^4".parse().unwrap()), 1.0);
        let m = pam(0.9, 3.0, 0.4, -3.0);
        assert!((m.stability_factor(&"1^1".parse().unwrap()) - 0.36).abs() < 1e-15);
    }

    #[test]
    fn generic_over_f32() {
        let m = PamCoefficients::<f32>::new(0.3, 1.0, 0.9, -2.0).unwrap();
        assert!((m.eval(-1.0).unwrap() - 0.7).abs() < 1e-6);
    }

    proptest::proptest! {
        #[test]
        fn transform_inverts_exactly(a11 in 1e-3f64..5.0, a12 in -50.0f64..50.0,
                                     a21 in 1e-3f64..5.0, a22 in -50.0f64..50.0) {
            let m = pam(a11, a12, a21, a22);
            let back = m.transform().to_pam();
            proptest::prop_assert_eq!(back.a11, m.a11);
            proptest::prop_assert_eq!(back.a12, m.a12);
            proptest::prop_assert_eq!(back.a21, m.a21);
            // a22 goes through (a22 - a12) + a12, which is exact only up to rounding.
            proptest::prop_assert!((back.a22 - m.a22).abs() <= 4.0 * f64::EPSILON * (a12.abs() + a22.abs()));
        }

        #[test]
        fn branches_strictly_increasing(a11 in 1e-3f64..5.0, a12 in -50.0f64..50.0,
                                        a21 in 1e-3f64..5.0, a22 in -50.0f64..50.0,
                                        z in 1e-3f64..100.0, dz in 1e-3f64..10.0) {
            let m = pam(a11, a12, a21, a22);
            proptest::prop_assert!(m.eval(z + dz).unwrap() > m.eval(z).unwrap());
            proptest::prop_assert!(m.eval(-z).unwrap() > m.eval(-z - dz).unwrap());
        }
    }
}
