//! The weight `ρ(x)` multiplying `F_x` in the primitive `Q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::poly::{q, FloatPoly, RationalPoly};
use crate::numeric::roots::scan_roots;
use crate::scalar::Real;

/// Interval on which `ρ` must be finite and nonzero. The rational choice has a
/// pole at `x ≈ -2.92`, so the check stops short of `-3`.
pub const RHO_DOMAIN: (f64, f64) = (-2.75, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoSpec<T> {
    /// `ρ(x) = p + x + q x²`.
    Quadratic { p: T, q: T },
    /// `ρ(x) = 1 / D(x)` with the quartic `D` normalised to `D(0) = 1`.
    FixedRational,
}

impl<T> Default for RhoSpec<T> {
    fn default() -> Self {
        RhoSpec::FixedRational
    }
}

/// Exact quartic denominator of the rational `ρ`.
pub fn rational_denominator() -> RationalPoly {
    let n = 22580479;
    RationalPoly::new(vec![
        q(n, n),
        q(-11520033, n),
        q(-4141461, n),
        q(2453432, n),
        q(552540, n),
    ])
}

impl<T: Real> RhoSpec<T> {
    /// Quadratic family with the default `(p, q) = (1, 1)`.
    pub fn quadratic_default() -> Self {
        RhoSpec::Quadratic { p: T::one(), q: T::one() }
    }

    /// Polynomial whose zeros are the singular points of `ρ`: `ρ` itself for
    /// the quadratic family, the denominator for the rational one.
    fn guard_poly(&self) -> FloatPoly<T> {
        match *self {
            RhoSpec::Quadratic { p, q } => FloatPoly::from_coeffs(vec![p, T::one(), q]),
            RhoSpec::FixedRational => rational_denominator().to_float(),
        }
    }

    /// Evaluator with the polynomials converted to floating point once.
    pub fn build(&self) -> Rho<T> {
        let guard = self.guard_poly();
        Rho {
            spec: *self,
            dguard: guard.derivative(),
            guard,
        }
    }

    /// Rejects non-finite parameters and any sign change or near-zero of the
    /// guard polynomial on [`RHO_DOMAIN`].
    pub fn validate(&self) -> Result<()> {
        if let RhoSpec::Quadratic { p, q } = *self {
            if !(p.is_finite() && q.is_finite()) {
                return Err(Error::InvalidRho("non-finite coefficients".into()));
            }
        }
        let g = self.guard_poly();
        let (lo, hi) = (T::lit(RHO_DOMAIN.0), T::lit(RHO_DOMAIN.1));
        let roots = scan_roots(|x| g.eval(x), lo, hi, T::lit(1e-3), T::lit(1e-9));
        if let Some(r) = roots.first() {
            return Err(Error::InvalidRho(format!("vanishing denominator or weight at x = {r}")));
        }
        let n = 10_000;
        let min_abs = (0..=n)
            .map(|k| g.eval(lo + (hi - lo) * T::from_usize(k).unwrap() / T::from_usize(n).unwrap()).abs())
            .fold(T::infinity(), T::min);
        if !(min_abs > T::lit(1e-8)) {
            return Err(Error::InvalidRho(format!(
                "guard polynomial nearly vanishes on the working interval (min {min_abs:e})"
            )));
        }
        Ok(())
    }

    /// Cache key independent of the scalar type.
    pub(crate) fn key(&self) -> (u8, u64, u64) {
        match *self {
            RhoSpec::Quadratic { p, q } => (0, p.as_f64().to_bits(), q.as_f64().to_bits()),
            RhoSpec::FixedRational => (1, 0, 0),
        }
    }
}

/// Evaluator for `ρ` and `ρ'`.
#[derive(Debug, Clone)]
pub struct Rho<T> {
    spec: RhoSpec<T>,
    guard: FloatPoly<T>,
    dguard: FloatPoly<T>,
}

impl<T: Real> Rho<T> {
    pub fn spec(&self) -> &RhoSpec<T> {
        &self.spec
    }

    #[inline]
    pub fn eval(&self, x: T) -> T {
        match self.spec {
            RhoSpec::Quadratic { .. } => self.guard.eval(x),
            RhoSpec::FixedRational => self.guard.eval(x).recip(),
        }
    }

    #[inline]
    pub fn derivative(&self, x: T) -> T {
        match self.spec {
            RhoSpec::Quadratic { .. } => self.dguard.eval(x),
            RhoSpec::FixedRational => {
                let d = self.guard.eval(x);
                -self.dguard.eval(x) / (d * d)
            }
        }
    }

    /// Coefficients of `ρ` when it is a polynomial.
    pub fn polynomial(&self) -> Option<&FloatPoly<T>> {
        matches!(self.spec, RhoSpec::Quadratic { .. }).then_some(&self.guard)
    }
}
