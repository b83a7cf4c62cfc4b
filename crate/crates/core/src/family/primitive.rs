//! The primitive `Q(x) = ∫₀ˣ ρ(s) F_s(s, z0) ds`.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::manifold::{CriticalManifold, ManifoldGeometry};
use super::rho::{Rho, RhoSpec};
use crate::error::Result;
use crate::numeric::poly::FloatPoly;
use crate::numeric::quadrature::{integrate, QuadOptions};
use crate::scalar::Real;

const NODE_SPACING: f64 = 0.125;
const NODE_MIN: i32 = -22;
const NODE_MAX: i32 = 16;

/// Quadrature settings used for `Q`: absolute tolerance `1e-12`, relaxed to a
/// small multiple of machine epsilon for narrow scalar types.
pub fn q_quad_options<T: Real>() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-12f64.max(64.0 * T::epsilon().as_f64()),
        rel_tol: 0.0,
        max_intervals: 10_000,
    }
}

#[derive(Debug, Clone)]
enum Kind<T> {
    /// `Q` as an explicit polynomial (polynomial `ρ`).
    Closed(FloatPoly<T>),
    /// Values of `Q` on a uniform node grid; other points are reached by
    /// quadrature from the nearest node.
    Table(Vec<T>),
}

/// `Q` for a fixed `ρ` and `z0`, together with the geometry of the `z0` slice
/// and `Q` at its seven pivot abscissas.
#[derive(Debug, Clone)]
pub struct Primitive<T> {
    rho: Rho<T>,
    z0: T,
    manifold: CriticalManifold<T>,
    geometry: ManifoldGeometry<T>,
    kind: Kind<T>,
    pivot_q: [T; 7],
}

type CacheKey = (TypeId, (u8, u64, u64), u64);
type Cache = Mutex<HashMap<CacheKey, Arc<dyn Any + Send + Sync>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl<T: Real> Primitive<T> {
    pub fn new(spec: RhoSpec<T>, z0: T) -> Result<Self> {
        spec.validate()?;
        let rho = spec.build();
        let manifold = CriticalManifold::new();
        let geometry = manifold.geometry(z0)?;
        let kind = match rho.polynomial() {
            Some(r) => {
                let fx: Vec<T> = {
                    let v = crate::family::manifold::exact_base().derivative().to_float::<T>();
                    let u = crate::family::manifold::exact_z_slope().derivative().to_float::<T>();
                    let n = v.coeffs().len().max(u.coeffs().len());
                    (0..n)
                        .map(|k| {
                            let a = v.coeffs().get(k).copied().unwrap_or(T::zero());
                            let b = u.coeffs().get(k).copied().unwrap_or(T::zero());
                            a + z0 * b
                        })
                        .collect()
                };
                Kind::Closed(r.mul(&FloatPoly::from_coeffs(fx)).integral())
            }
            None => Kind::Table(Vec::new()),
        };
        let mut prim = Self {
            rho,
            z0,
            manifold,
            geometry,
            kind,
            pivot_q: [T::zero(); 7],
        };
        if let Kind::Table(_) = prim.kind {
            prim.kind = Kind::Table(prim.build_table()?);
        }
        let pivots = prim.geometry.pivots();
        for (k, x) in pivots.into_iter().enumerate() {
            prim.pivot_q[k] = prim.q(x)?;
        }
        Ok(prim)
    }

    /// Shared instance for `(ρ, z0)`, built on first use.
    pub fn shared(spec: RhoSpec<T>, z0: T) -> Result<Arc<Self>> {
        let key = (TypeId::of::<T>(), spec.key(), z0.as_f64().to_bits());
        if let Some(hit) = cache().lock().expect("cache lock").get(&key) {
            return Ok(hit.clone().downcast::<Self>().expect("keyed by scalar type"));
        }
        let built = Arc::new(Self::new(spec, z0)?);
        let mut guard = cache().lock().expect("cache lock");
        if guard.len() >= 256 {
            guard.clear();
        }
        let entry = guard.entry(key).or_insert_with(|| built.clone());
        Ok(entry.clone().downcast::<Self>().expect("keyed by scalar type"))
    }

    fn node(k: i32) -> T {
        T::lit(k as f64 * NODE_SPACING)
    }

    fn build_table(&self) -> Result<Vec<T>> {
        let opts = q_quad_options::<T>();
        let mut values = vec![T::zero(); (NODE_MAX - NODE_MIN + 1) as usize];
        let idx = |k: i32| (k - NODE_MIN) as usize;
        for k in 1..=NODE_MAX {
            let step = integrate(|s| self.q_prime(s), Self::node(k - 1), Self::node(k), &opts)?;
            values[idx(k)] = values[idx(k - 1)] + step.value;
        }
        for k in (NODE_MIN..0).rev() {
            let step = integrate(|s| self.q_prime(s), Self::node(k + 1), Self::node(k), &opts)?;
            values[idx(k)] = values[idx(k + 1)] + step.value;
        }
        Ok(values)
    }

    pub fn q(&self, x: T) -> Result<T> {
        match &self.kind {
            Kind::Closed(poly) => Ok(poly.eval(x)),
            Kind::Table(values) => {
                let k = (x / T::lit(NODE_SPACING))
                    .round()
                    .to_i32()
                    .unwrap_or(0)
                    .clamp(NODE_MIN, NODE_MAX);
                let base = values[(k - NODE_MIN) as usize];
                let rest = integrate(|s| self.q_prime(s), Self::node(k), x, &q_quad_options::<T>())?;
                Ok(base + rest.value)
            }
        }
    }

    /// `Q'(x) = ρ(x) F_x(x, z0)`.
    #[inline]
    pub fn q_prime(&self, x: T) -> T {
        self.rho.eval(x) * self.manifold.fx(x, self.z0)
    }

    /// `Q''(x) = ρ'(x) F_x(x, z0) + ρ(x) F_xx(x, z0)`.
    #[inline]
    pub fn q_second(&self, x: T) -> T {
        self.rho.derivative(x) * self.manifold.fx(x, self.z0)
            + self.rho.eval(x) * self.manifold.fxx(x, self.z0)
    }

    /// `Q` at `(x̂4, x1, x2, x3, x4, x̂3, x̂1)`.
    pub fn pivot_q(&self) -> [T; 7] {
        self.pivot_q
    }

    pub fn geometry(&self) -> &ManifoldGeometry<T> {
        &self.geometry
    }

    pub fn manifold(&self) -> &CriticalManifold<T> {
        &self.manifold
    }

    pub fn rho(&self) -> &Rho<T> {
        &self.rho
    }

    pub fn z0(&self) -> T {
        self.z0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // With the rational weight, ρ F_x(·, 0) = x⁴ + 2x³ - x² - 2x exactly.
    fn q_oracle(x: f64) -> f64 {
        x.powi(5) / 5.0 + x.powi(4) / 2.0 - x.powi(3) / 3.0 - x * x
    }

    #[test]
    fn rational_primitive_matches_polynomial_identity() {
        let prim = Primitive::new(RhoSpec::FixedRational, 0.0).unwrap();
        for k in 0..=47 {
            let x = -2.75 + 0.1 * k as f64;
            assert!((prim.q(x).unwrap() - q_oracle(x)).abs() < 1e-11, "x = {x}");
        }
        for (qv, x) in prim.pivot_q().iter().zip(prim.geometry().pivots()) {
            assert!((qv - q_oracle(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn pivot_difference_matches_composite_rule() {
        let prim = Primitive::new(RhoSpec::FixedRational, 0.0).unwrap();
        let g = *prim.geometry();
        let (a, b) = (g.xhat4, g.x4);
        let n = 200_000;
        let h = (b - a) / n as f64;
        // Composite Simpson on a fine grid.
        let mut acc = prim.q_prime(a) + prim.q_prime(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * prim.q_prime(a + h * i as f64);
        }
        let oracle = acc * h / 3.0;
        let got = prim.q(b).unwrap() - prim.q(a).unwrap();
        assert!((got - oracle).abs() < 1e-10, "{got} vs {oracle}");
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for (p, q) in [(4.0, 0.0), (1.0, 1.0)] {
            let prim = Primitive::<f64>::new(RhoSpec::Quadratic { p, q }, 0.0).unwrap();
            let quad = integrate(|s| prim.q_prime(s), 0.0, 1.0, &QuadOptions::default()).unwrap();
            assert!((prim.q(1.0).unwrap() - quad.value).abs() < 1e-12);
            assert_eq!(prim.q(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        let h = 1e-6;
        for spec in [RhoSpec::FixedRational, RhoSpec::Quadratic { p: 1.0, q: 1.0 }] {
            let prim = Primitive::new(spec, 0.0).unwrap();
            for k in 0..30 {
                let x = -2.6 + 0.15 * k as f64;
                let fd = (prim.q_prime(x + h) - prim.q_prime(x - h)) / (2.0 * h);
                assert!((fd - prim.q_second(x)).abs() < 1e-6 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn shared_instances_are_reused() {
        let a = Primitive::<f64>::shared(RhoSpec::FixedRational, 0.0).unwrap();
        let b = Primitive::<f64>::shared(RhoSpec::FixedRational, 0.0).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let c = Primitive::<f32>::shared(RhoSpec::FixedRational, 0.0).unwrap();
        assert!((c.pivot_q()[6] - q_oracle(1.6) as f32).abs() < 1e-4);
    }

    #[test]
    fn concurrent_readers_share_one_table() {
        let handles: Vec<_> = (0..8)
            .map(|_| std::thread::spawn(|| Primitive::<f64>::shared(RhoSpec::Quadratic { p: 3.0, q: 0.25 }, 0.0).unwrap()))
            .collect();
        let prims: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for p in &prims[1..] {
            assert!(Arc::ptr_eq(p, &prims[0]));
        }
    }
}
