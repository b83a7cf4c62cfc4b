//! The degree-9 critical manifold `y = F(x, z)` and its fold geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::poly::{q, FloatPoly, Rational, RationalPoly};
use crate::numeric::roots::{refine_bracket, scan_roots};
use crate::scalar::Real;

/// Left end of the working interval in `x`.
pub const X_MIN: f64 = -3.0;
/// Right end of the working interval in `x`.
pub const X_MAX: f64 = 2.0;
/// Grid spacing of the sign-change scans.
pub const SCAN_STEP: f64 = 1e-3;
/// Target bracket width for refined roots.
pub const ROOT_TOL: f64 = 1e-12;

// a_k(z) = c_k (u_k z + v_k), listed from k = 2 to k = 9.
const COEFFS: [((i128, i128), (i128, i128), (i128, i128)); 8] = [
    ((-1, 2), (1, 8), (2, 1)),
    ((1, 3), (45620545, 361287664), (459587, 22580479)),
    ((1, 4), (2417921, 45160958), (64963913, 22580479)),
    ((-1, 5), (10284179, 180643832), (1224990, 22580479)),
    ((-1, 6), (2793109, 361287664), (23361467, 22580479)),
    ((1, 7), (751493, 90321916), (212863, 22580479)),
    ((1, 8), (138135, 90321916), (3558512, 22580479)),
    ((1, 1), (0, 1), (184180, 67741437)),
];

/// `z`-independent part `V` of `F = V + z U`, exact.
pub fn exact_base() -> RationalPoly {
    let mut c = vec![Rational::from_integer(0); 2];
    c.extend(COEFFS.iter().map(|&(ck, _, vk)| q(ck.0, ck.1) * q(vk.0, vk.1)));
    RationalPoly::new(c)
}

/// Coefficient `U` of `z` in `F = V + z U`, exact.
pub fn exact_z_slope() -> RationalPoly {
    let mut c = vec![Rational::from_integer(0); 2];
    c.extend(COEFFS.iter().map(|&(ck, uk, _)| q(ck.0, ck.1) * q(uk.0, uk.1)));
    RationalPoly::new(c)
}

/// `F(x, z)` with its partial derivatives, evaluated by Horner's scheme.
#[derive(Debug, Clone)]
pub struct CriticalManifold<T> {
    v: [FloatPoly<T>; 3],
    u: [FloatPoly<T>; 3],
}

impl<T: Real> Default for CriticalManifold<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> CriticalManifold<T> {
    pub fn new() -> Self {
        let (v, u) = (exact_base(), exact_z_slope());
        let (v1, u1) = (v.derivative(), u.derivative());
        let (v2, u2) = (v1.derivative(), u1.derivative());
        Self {
            v: [v.to_float(), v1.to_float(), v2.to_float()],
            u: [u.to_float(), u1.to_float(), u2.to_float()],
        }
    }

    #[inline]
    pub fn f(&self, x: T, z: T) -> T {
        self.v[0].eval(x) + z * self.u[0].eval(x)
    }

    #[inline]
    pub fn fx(&self, x: T, z: T) -> T {
        self.v[1].eval(x) + z * self.u[1].eval(x)
    }

    #[inline]
    pub fn fxx(&self, x: T, z: T) -> T {
        self.v[2].eval(x) + z * self.u[2].eval(x)
    }

    #[inline]
    pub fn fz(&self, x: T) -> T {
        self.u[0].eval(x)
    }

    #[inline]
    pub fn fxz(&self, x: T) -> T {
        self.u[1].eval(x)
    }

    /// Folds and projection points of the slice `z = const`.
    pub fn geometry(&self, z: T) -> Result<ManifoldGeometry<T>> {
        let lo = T::lit(X_MIN);
        let hi = T::lit(X_MAX);
        let step = T::lit(SCAN_STEP);
        let xtol = T::lit(ROOT_TOL).max(T::epsilon() * T::lit(8.0));
        let roots = scan_roots(|x| self.fx(x, z), lo, hi, step, xtol);
        let simple: Vec<T> = roots
            .into_iter()
            .filter(|&r| self.fxx(r, z).abs() > T::lit(1e-6))
            .collect();
        if simple.len() < 4 {
            return Err(Error::GeometryFailure(format!(
                "found {} simple folds in [{X_MIN}, {X_MAX}], need 4",
                simple.len()
            )));
        }
        // A fifth fold sits next to the pole of the rational rho near x = -3;
        // the four rightmost folds bound the three attracting sheets.
        let folds = &simple[simple.len() - 4..];
        let (x1, x2, x3, x4) = (folds[0], folds[1], folds[2], folds[3]);
        let (y1, y2, y3, y4) = (self.f(x1, z), self.f(x2, z), self.f(x3, z), self.f(x4, z));

        let gap = step * T::lit(10.0);
        let level = |target: T, a: T, b: T| scan_roots(|x| self.f(x, z) - target, a, b, step, xtol);
        let xhat4 = level(y4, lo, x1 - gap)
            .last()
            .copied()
            .ok_or_else(|| Error::GeometryFailure("no projection of x4 left of x1".into()))?;
        let xhat3 = level(y3, x4 + gap, hi)
            .first()
            .copied()
            .ok_or_else(|| Error::GeometryFailure("no projection of x3 right of x4".into()))?;
        let xhat1 = level(y1, x4 + gap, hi)
            .first()
            .copied()
            .ok_or_else(|| Error::GeometryFailure("no projection of x1 right of x4".into()))?;
        Ok(ManifoldGeometry {
            x1,
            x2,
            x3,
            x4,
            xhat1,
            xhat3,
            xhat4,
            y1,
            y2,
            y3,
            y4,
        })
    }

    /// Point on the sheet right of `x4` at height `y`, if `y` is in its range.
    pub fn right_sheet_point(&self, y: T, z: T, x4: T) -> Option<T> {
        let step = T::lit(SCAN_STEP);
        let xtol = T::lit(ROOT_TOL).max(T::epsilon() * T::lit(8.0));
        let mut a = x4;
        let hi = T::lit(X_MAX);
        let mut fa = self.f(a, z) - y;
        while a < hi {
            let b = (a + step * T::lit(10.0)).min(hi);
            let fb = self.f(b, z) - y;
            if fa.signum() != fb.signum() || fb == T::zero() {
                return refine_bracket(|x| self.f(x, z) - y, a, b, xtol);
            }
            a = b;
            fa = fb;
        }
        None
    }

    /// Point on the sheet left of `x1` at height `y`, if `y` is in its range.
    pub fn left_sheet_point(&self, y: T, z: T, x1: T) -> Option<T> {
        let step = T::lit(SCAN_STEP);
        let xtol = T::lit(ROOT_TOL).max(T::epsilon() * T::lit(8.0));
        let lo = T::lit(X_MIN);
        let mut b = x1;
        let mut fb = self.f(b, z) - y;
        while b > lo {
            let a = (b - step * T::lit(10.0)).max(lo);
            let fa = self.f(a, z) - y;
            if fa.signum() != fb.signum() || fa == T::zero() {
                return refine_bracket(|x| self.f(x, z) - y, a, b, xtol);
            }
            b = a;
            fb = fa;
        }
        None
    }
}

/// Fold abscissas `x1 < x2 < x3 < x4`, their projections and fold heights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldGeometry<T> {
    pub x1: T,
    pub x2: T,
    pub x3: T,
    pub x4: T,
    pub xhat1: T,
    pub xhat3: T,
    pub xhat4: T,
    pub y1: T,
    pub y2: T,
    pub y3: T,
    pub y4: T,
}

impl<T: Real> ManifoldGeometry<T> {
    /// `(x̂4, x1, x2, x3, x4, x̂3, x̂1)` in ascending order.
    pub fn pivots(&self) -> [T; 7] {
        [
            self.xhat4, self.x1, self.x2, self.x3, self.x4, self.xhat3, self.xhat1,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> CriticalManifold<f64> {
        CriticalManifold::new()
    }

    #[test]
    fn vanishes_at_origin_for_every_z() {
        for z in [-1.0, -0.3, 0.0, 0.7] {
            assert_eq!(m().f(0.0, z), 0.0);
        }
    }

    #[test]
    fn folds_at_integer_pivots() {
        for x in [-2.0, -1.0, 0.0, 1.0] {
            assert!(m().fx(x, 0.0).abs() < 1e-13, "F_x({x}) = {}", m().fx(x, 0.0));
        }
    }

    #[test]
    fn fold_polynomial_factors_exactly() {
        // F_x(x, 0) = x (x - 1)(x + 1)(x + 2) D(x) with D the rational-rho denominator.
        let fx = exact_base().derivative();
        let n = 22580479;
        let d = RationalPoly::new(vec![
            q(n, n),
            q(-11520033, n),
            q(-4141461, n),
            q(2453432, n),
            q(552540, n),
        ]);
        let quartic = RationalPoly::new(vec![q(0, 1), q(-2, 1), q(-1, 1), q(2, 1), q(1, 1)]);
        assert_eq!(&quartic * &d, fx);
    }

    #[test]
    fn equal_heights_at_projections() {
        let m = m();
        let (a, b, c) = (m.f(-2.5, 0.0), m.f(-1.0, 0.0), m.f(1.0, 0.0));
        assert!((a - b).abs() < 1e-13 && (b - c).abs() < 1e-13);
        assert!((m.f(1.5, 0.0) - m.f(0.0, 0.0)).abs() < 1e-13);
        assert!((m.f(1.6, 0.0) - m.f(-2.0, 0.0)).abs() < 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let m = m();
        let h = 1e-5;
        for k in 0..=50 {
            let x = X_MIN + 0.1 * k as f64;
            for z in [-0.8, 0.0, 0.5] {
                let fd = (m.f(x + h, z) - m.f(x - h, z)) / (2.0 * h);
                assert!((fd - m.fx(x, z)).abs() < 1e-6 * (1.0 + fd.abs()), "x = {x}");
                let fd2 = (m.fx(x + h, z) - m.fx(x - h, z)) / (2.0 * h);
                assert!((fd2 - m.fxx(x, z)).abs() < 1e-5 * (1.0 + fd2.abs()), "x = {x}");
                let fdz = (m.f(x, z + h) - m.f(x, z - h)) / (2.0 * h);
                assert!((fdz - m.fz(x)).abs() < 1e-6 * (1.0 + fdz.abs()));
            }
        }
    }

    #[test]
    fn geometry_reproduces_pivots() {
        let g = m().geometry(0.0).unwrap();
        let expect = [-2.5, -2.0, -1.0, 0.0, 1.0, 1.5, 1.6];
        for (got, want) in g.pivots().iter().zip(expect) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        let m = m();
        assert!((m.f(g.xhat1, 0.0) - g.y1).abs() < 1e-10);
        for x in [g.x1, g.x2, g.x3, g.x4] {
            assert!(m.fxx(x, 0.0).abs() > 1.0);
        }
    }

    #[test]
    fn geometry_in_single_precision() {
        let g = CriticalManifold::<f32>::new().geometry(0.0).unwrap();
        assert!((g.xhat1 - 1.6).abs() < 1e-3);
        assert!((g.x2 + 1.0).abs() < 1e-3);
    }

    #[test]
    fn second_fold_moves_with_z() {
        let m = m();
        let g = m.geometry(0.2).unwrap();
        assert!((g.x1 + 2.0).abs() < 1e-10 && (g.x4 - 1.0).abs() < 1e-10);
        assert!((g.x2 + 1.0).abs() > 1e-4);
    }

    #[test]
    fn sheet_points_invert_f() {
        let m = m();
        let x = m.right_sheet_point(m.f(1.3, 0.0), 0.0, 1.0).unwrap();
        assert!((x - 1.3).abs() < 1e-10);
        let x = m.left_sheet_point(m.f(-2.3, 0.0), 0.0, -2.0).unwrap();
        assert!((x + 2.3).abs() < 1e-10);
    }
}
