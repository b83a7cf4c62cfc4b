//! The canonical slow-fast vector field built from `(α, β, κ, λ, ρ)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::manifold::{CriticalManifold, ManifoldGeometry};
use super::primitive::Primitive;
use super::rho::RhoSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `|F_x|` below which `p` and `q` are not evaluated.
pub const FOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams<T> {
    pub alpha: T,
    pub beta: T,
    pub kappa: T,
    pub lambda: T,
    #[serde(default)]
    pub rho: RhoSpec<T>,
    #[serde(default)]
    pub z0: T,
}

impl<T: Real> CanonicalParams<T> {
    pub fn new(alpha: T, beta: T, kappa: T, lambda: T, rho: RhoSpec<T>) -> Self {
        Self { alpha, beta, kappa, lambda, rho, z0: T::zero() }
    }
}

/// Values of `P`, `αQ + β`, `ρ` and `J` at one point.
#[derive(Debug, Clone, Copy)]
struct Pointwise<T> {
    p_big: T,
    w: T,
    rho: T,
    j: T,
}

/// Evaluator for `F`, `Q`, `G`, `H`, `J`, `p`, `q` and the full right-hand side.
#[derive(Debug, Clone)]
pub struct CanonicalField<T> {
    params: CanonicalParams<T>,
    prim: Arc<Primitive<T>>,
}

impl<T: Real> CanonicalField<T> {
    pub fn new(params: CanonicalParams<T>) -> Result<Self> {
        let prim = Primitive::shared(params.rho, params.z0)?;
        Ok(Self { params, prim })
    }

    /// Reuses an already built primitive; it must match `params.rho` and `params.z0`.
    pub fn with_primitive(params: CanonicalParams<T>, prim: Arc<Primitive<T>>) -> Self {
        debug_assert!(prim.rho().spec() == &params.rho && prim.z0() == params.z0);
        Self { params, prim }
    }

    pub fn params(&self) -> &CanonicalParams<T> {
        &self.params
    }

    pub fn primitive(&self) -> &Arc<Primitive<T>> {
        &self.prim
    }

    pub fn manifold(&self) -> &CriticalManifold<T> {
        self.prim.manifold()
    }

    pub fn geometry(&self) -> &ManifoldGeometry<T> {
        self.prim.geometry()
    }

    pub fn f(&self, x: T, z: T) -> T {
        self.manifold().f(x, z)
    }

    pub fn fx(&self, x: T, z: T) -> T {
        self.manifold().fx(x, z)
    }

    pub fn q(&self, x: T) -> Result<T> {
        self.prim.q(x)
    }

    /// `P(x) = αQ²/2 + βQ`.
    pub fn big_p(&self, x: T) -> Result<T> {
        Ok(self.p_of_q(self.q(x)?))
    }

    pub(crate) fn p_of_q(&self, q: T) -> T {
        let c = &self.params;
        (c.alpha * q * T::lit(0.5) + c.beta) * q
    }

    pub fn j(&self, x: T) -> T {
        T::lit(0.5) - x
    }

    fn pointwise(&self, x: T) -> Result<Pointwise<T>> {
        let q = self.q(x)?;
        Ok(Pointwise {
            p_big: self.p_of_q(q),
            w: self.params.alpha * q + self.params.beta,
            rho: self.prim.rho().eval(x),
            j: self.j(x),
        })
    }

    pub fn h(&self, x: T) -> Result<T> {
        let s = self.pointwise(x)?;
        Ok(s.rho * s.w * s.j)
    }

    pub fn g(&self, x: T) -> Result<T> {
        let s = self.pointwise(x)?;
        Ok((self.params.kappa + self.params.lambda * s.p_big) * s.w * s.rho * s.j)
    }

    /// `(G, H)` from a single evaluation of `Q`.
    pub fn gh(&self, x: T) -> Result<(T, T)> {
        let s = self.pointwise(x)?;
        let h = s.rho * s.w * s.j;
        Ok(((self.params.kappa + self.params.lambda * s.p_big) * h, h))
    }

    /// Coefficients of the reduced equation `dZ/dx = p(x) Z + q(x)`; fails at folds.
    pub fn pq(&self, x: T) -> Result<(T, T)> {
        let fx = self.fx(x, self.params.z0);
        if !(fx.abs() > T::lit(FOLD_TOL)) {
            return Err(Error::FoldPointEvaluation { x: x.as_f64(), fx: fx.abs().as_f64() });
        }
        self.pq_unchecked(x)
    }

    /// `(p, q)` without the fold check; both vanish at folds.
    pub fn pq_unchecked(&self, x: T) -> Result<(T, T)> {
        let s = self.pointwise(x)?;
        let p = s.rho * s.w * self.fx(x, self.params.z0);
        Ok((p, (self.params.kappa + self.params.lambda * s.p_big) * p))
    }

    /// Fast-time right-hand side `(y - F, ε J, ε (δ G + (z - z0) H))`.
    pub fn vector_field(&self, x: T, y: T, z: T, eps: T, delta: T) -> Result<[T; 3]> {
        let dx = y - self.f(x, z);
        if eps == T::zero() {
            return Ok([dx, T::zero(), T::zero()]);
        }
        let (g, h) = self.g_and_h(x)?;
        Ok([dx, eps * self.j(x), eps * (delta * g + (z - self.params.z0) * h)])
    }

    fn g_and_h(&self, x: T) -> Result<(T, T)> {
        let s = self.pointwise(x)?;
        let h = s.rho * s.w * s.j;
        Ok(((self.params.kappa + self.params.lambda * s.p_big) * h, h))
    }

    /// Slow-time right-hand side `((y - F)/ε, J, δ G + (z - z0) H)`.
    pub fn slow_rhs(&self, state: [T; 3], eps: T, delta: T) -> Result<[T; 3]> {
        let [x, y, z] = state;
        let (g, h) = self.g_and_h(x)?;
        Ok([
            (y - self.f(x, z)) / eps,
            self.j(x),
            delta * g + (z - self.params.z0) * h,
        ])
    }

    /// Jacobian of [`Self::slow_rhs`], row-major.
    pub fn slow_jacobian(&self, state: [T; 3], eps: T, delta: T) -> Result<[[T; 3]; 3]> {
        let [x, _, z] = state;
        let m = self.manifold();
        let c = &self.params;
        let s = self.pointwise(x)?;
        let (dq, rho_d) = (self.prim.q_prime(x), self.prim.rho().derivative(x));
        let dw = c.alpha * dq;
        let dp_big = s.w * dq;
        let h = s.rho * s.w * s.j;
        let dh = rho_d * s.w * s.j + s.rho * dw * s.j - s.rho * s.w;
        let k = c.kappa + c.lambda * s.p_big;
        let dg = c.lambda * dp_big * h + k * dh;
        let zero = T::zero();
        Ok([
            [-m.fx(x, z) / eps, eps.recip(), -m.fz(x) / eps],
            [-T::one(), zero, zero],
            [delta * dg + (z - c.z0) * dh, zero, h],
        ])
    }
}
