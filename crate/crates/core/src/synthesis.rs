//! Inverse problem: canonical-family parameters whose associated PAM is a
//! given target.
//!
//! Log-slopes are linear in `(α, β)`, so the slopes fix `(α, β)` through a
//! 2×2 solve. Offsets are then affine in `(κ, λ)`, which a second 2×2 solve
//! fixes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assoc::{associated_pam_with, branch_segments, closed_form_from_p, relative_deviation, SegmentMethod};
use crate::error::{Error, Result};
use crate::family::{CanonicalField, CanonicalParams, ManifoldGeometry, Primitive, RhoSpec};
use crate::numeric::linalg::{det2, solve2};
use crate::pam::PamCoefficients;
use crate::scalar::Real;

/// Smallest admissible `|det|` for either linear solve.
pub const DET_TOL: f64 = 1e-10;
/// Relative residual (unit floor) accepted when re-evaluating the synthesized field.
pub const VERIFY_TOL: f64 = 1e-8;

/// `Q` at the pivots of `geom`, from the cache when the geometry is the cached one.
fn pivot_q<T: Real>(prim: &Primitive<T>, geom: &ManifoldGeometry<T>) -> Result<[T; 7]> {
    if prim.geometry() == geom {
        return Ok(prim.pivot_q());
    }
    let mut out = [T::zero(); 7];
    for (slot, x) in out.iter_mut().zip(geom.pivots()) {
        *slot = prim.q(x)?;
    }
    Ok(out)
}

fn slope_matrix_from_q<T: Real>(qv: [T; 7]) -> [[T; 2]; 2] {
    let [qh4, q1, q2, q3, q4, qh3, qh1] = qv;
    let half = T::lit(0.5);
    [
        [
            half * (q1 * q1 - qh4 * qh4 + q4 * q4 - qh1 * qh1),
            q1 - qh4 + q4 - qh1,
        ],
        [
            half * (q3 * q3 - q2 * q2 + q4 * q4 - qh3 * qh3),
            q3 - q2 + q4 - qh3,
        ],
    ]
}

/// Matrix `A` with `(ln a11, ln a21) = A (α, β)`.
pub fn slope_matrix<T: Real>(rho: &RhoSpec<T>, geom: &ManifoldGeometry<T>) -> Result<[[T; 2]; 2]> {
    let prim = Primitive::shared(*rho, T::zero())?;
    Ok(slope_matrix_from_q(pivot_q(&prim, geom)?))
}

pub fn solve_alpha_beta<T: Real>(a11: T, a21: T, rho: &RhoSpec<T>, geom: &ManifoldGeometry<T>) -> Result<(T, T)> {
    if !(a11 > T::zero() && a21 > T::zero()) {
        return Err(Error::Domain(format!("slopes must be positive (a11 = {a11}, a21 = {a21})")));
    }
    let a = slope_matrix(rho, geom)?;
    let [alpha, beta] = solve2(a, [a11.ln(), a21.ln()], T::lit(DET_TOL))?;
    Ok((alpha, beta))
}

/// Offset matrix `N` and offsets at `κ = λ = 0`, so that
/// `(a12, a22) = o + N (κ, λ)`.
fn offset_system<T: Real>(
    alpha: T,
    beta: T,
    rho: &RhoSpec<T>,
    geom: &ManifoldGeometry<T>,
) -> Result<([[T; 2]; 2], [T; 2])> {
    let prim = Primitive::shared(*rho, T::zero())?;
    let qv = pivot_q(&prim, geom)?;
    let big_p = |q: T| (alpha * q * T::lit(0.5) + beta) * q;
    let [qh4, q1, q2, q3, q4, qh3, qh1] = qv.map(big_p);
    let offsets = |kappa: T, lambda: T| {
        let c = CanonicalParams::new(alpha, beta, kappa, lambda, *rho);
        let compose = |first: (T, T), second: (T, T)| {
            let m1 = closed_form_from_p(&c, first.0, first.1);
            let m2 = closed_form_from_p(&c, second.0, second.1);
            m2.slope * m1.offset + m2.offset
        };
        [compose((qh4, q1), (qh1, q4)), compose((q2, q3), (qh3, q4))]
    };
    let o = offsets(T::zero(), T::zero());
    let ek = offsets(T::one(), T::zero());
    let el = offsets(T::zero(), T::one());
    Ok((
        [[ek[0] - o[0], el[0] - o[0]], [ek[1] - o[1], el[1] - o[1]]],
        o,
    ))
}

pub fn solve_kappa_lambda<T: Real>(
    a12: T,
    a22: T,
    alpha: T,
    beta: T,
    rho: &RhoSpec<T>,
    geom: &ManifoldGeometry<T>,
) -> Result<(T, T)> {
    let (n, o) = offset_system(alpha, beta, rho, geom)?;
    let [kappa, lambda] = solve2(n, [a12 - o[0], a22 - o[1]], T::lit(DET_TOL))?;
    Ok((kappa, lambda))
}

/// Synthesized parameters with the diagnostics of both solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct SynthesisReport<T> {
    pub params: CanonicalParams<T>,
    pub achieved: PamCoefficients<T>,
    pub residual: f64,
    pub slope_det: T,
    pub offset_det: T,
}

/// Same as [`synthesize`], returning the diagnostics.
pub fn synthesize_report<T: Real>(target: &PamCoefficients<T>, rho: RhoSpec<T>) -> Result<SynthesisReport<T>> {
    target.validate()?;
    let prim: Arc<Primitive<T>> = Primitive::shared(rho, T::zero())?;
    let geom = *prim.geometry();
    let slope_det = det2(slope_matrix(&rho, &geom)?);
    let (alpha, beta) = solve_alpha_beta(target.a11, target.a21, &rho, &geom)?;
    let offset_det = det2(offset_system(alpha, beta, &rho, &geom)?.0);
    let (kappa, lambda) = solve_kappa_lambda(target.a12, target.a22, alpha, beta, &rho, &geom)?;
    let params = CanonicalParams::new(alpha, beta, kappa, lambda, rho);
    let field = CanonicalField::with_primitive(params, prim);
    let achieved = associated_pam_with(&field, &geom, SegmentMethod::ClosedForm)?;
    let residual = [
        relative_deviation(achieved.a11, target.a11),
        relative_deviation(achieved.a12, target.a12),
        relative_deviation(achieved.a21, target.a21),
        relative_deviation(achieved.a22, target.a22),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let tol = VERIFY_TOL.max(1e4 * T::epsilon().as_f64());
    if !(residual <= tol) {
        return Err(Error::SynthesisVerificationFailure(residual));
    }
    Ok(SynthesisReport {
        params,
        achieved,
        residual,
        slope_det,
        offset_det,
    })
}

/// Canonical-family parameters whose associated PAM equals `target`,
/// verified by re-evaluating the forward map.
pub fn synthesize<T: Real>(target: &PamCoefficients<T>, rho: RhoSpec<T>) -> Result<CanonicalParams<T>> {
    synthesize_report(target, rho).map(|r| r.params)
}

/// Path segments used by the solves, exposed for diagnostics.
pub fn synthesis_segments<T: Real>(geom: &ManifoldGeometry<T>) -> [[(T, T); 2]; 2] {
    let (lao, sao) = branch_segments(geom);
    [
        [(lao[0].x_start, lao[0].x_end), (lao[1].x_start, lao[1].x_end)],
        [(sao[0].x_start, sao[0].x_end), (sao[1].x_start, sao[1].x_end)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assoc::segment_affine;
    use crate::family::compute_geometry;

    fn geom() -> ManifoldGeometry<f64> {
        compute_geometry(&CanonicalParams::new(0.0, 0.0, 0.0, 0.0, RhoSpec::FixedRational)).unwrap()
    }

    #[test]
    fn identity_slopes_give_zero_alpha_beta() {
        let (a, b) = solve_alpha_beta(1.0, 1.0, &RhoSpec::FixedRational, &geom()).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
    }

    #[test]
    fn slope_matrix_matches_forward_slopes() {
        let g = geom();
        let a = slope_matrix(&RhoSpec::FixedRational, &g).unwrap();
        assert!(det2(a).abs() > 1e-3);
        for (alpha, beta) in [(0.31, -0.8), (-0.9, 0.05), (0.6, 0.6)] {
            let f = CanonicalField::new(CanonicalParams::new(alpha, beta, 1.0, 1.0, RhoSpec::FixedRational)).unwrap();
            let (lao, sao) = branch_segments(&g);
            let s = |segs: [crate::assoc::SegmentSpec<f64>; 2]| {
                segs.iter()
                    .map(|sg| segment_affine(&f, sg, SegmentMethod::Quadrature).unwrap().slope)
                    .product::<f64>()
            };
            let la = a[0][0] * alpha + a[0][1] * beta;
            let ls = a[1][0] * alpha + a[1][1] * beta;
            assert!((la.exp() - s(lao)).abs() < 1e-9 * s(lao));
            assert!((ls.exp() - s(sao)).abs() < 1e-9 * s(sao));
        }
    }

    #[test]
    fn printed_alpha_beta() {
        let g = geom();
        let (a, b) = solve_alpha_beta(0.3, 0.9, &RhoSpec::FixedRational, &g).unwrap();
        assert!((a - 0.8743).abs() < 1e-3 && (b - 0.0240).abs() < 1e-3, "{a} {b}");
        let (a, b) = solve_alpha_beta(0.9, 0.4, &RhoSpec::FixedRational, &g).unwrap();
        assert!((a + 0.5065).abs() < 1e-3 && (b - 1.0238).abs() < 1e-3, "{a} {b}");
    }

    #[test]
    fn printed_kappa_lambda() {
        let g = geom();
        let (a, b) = solve_alpha_beta(0.3, 0.9, &RhoSpec::FixedRational, &g).unwrap();
        let (k, l) = solve_kappa_lambda(1.0, -2.0, a, b, &RhoSpec::FixedRational, &g).unwrap();
        assert!((k - 27.2674).abs() < 1e-3 && (l + 64.5764).abs() < 1e-3, "{k} {l}");
        let (k, l) = solve_kappa_lambda(25.0, -2.0, a, b, &RhoSpec::FixedRational, &g).unwrap();
        assert!((k - 38.8954).abs() < 1e-3 && (l + 167.8987).abs() < 1e-3, "{k} {l}");
        let (k, l) = solve_kappa_lambda(0.0, 0.0, a, b, &RhoSpec::FixedRational, &g).unwrap();
        assert_eq!((k, l), (0.0, 0.0));
    }

    #[test]
    fn crossover_endpoint() {
        let p = synthesize(&PamCoefficients::<f64>::new(0.9, 6.0, 0.85, -1.0).unwrap(), RhoSpec::FixedRational).unwrap();
        for (got, want) in [(p.alpha, -0.0220), (p.beta, 0.1747), (p.kappa, 7.7321), (p.lambda, -233.3068)] {
            assert!((got - want).abs() < 1e-3, "{p:?}");
        }
    }

    #[test]
    fn alpha_beta_ignore_offsets() {
        let a = synthesize(&PamCoefficients::<f64>::new(0.3, 1.0, 0.9, -2.0).unwrap(), RhoSpec::FixedRational).unwrap();
        let b = synthesize(&PamCoefficients::<f64>::new(0.3, 17.0, 0.9, 4.0).unwrap(), RhoSpec::FixedRational).unwrap();
        assert_eq!((a.alpha.to_bits(), a.beta.to_bits()), (b.alpha.to_bits(), b.beta.to_bits()));
    }

    #[test]
    fn quadratic_family_roundtrip() {
        let target = PamCoefficients::<f64>::new(0.45, -3.0, 0.7, 8.0).unwrap();
        let r = synthesize_report(&target, RhoSpec::quadratic_default()).unwrap();
        assert!(r.residual < 1e-10);
        assert!(r.slope_det.abs() > 1e-10);
    }

    #[test]
    fn rejects_nonpositive_slope() {
        assert!(matches!(
            solve_alpha_beta(0.0, 0.5, &RhoSpec::FixedRational, &geom()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn synthesis_in_single_precision() {
        let target = PamCoefficients::<f32>::new(0.3, 1.0, 0.9, -2.0).unwrap();
        let p = synthesize(&target, RhoSpec::FixedRational).unwrap();
        assert!((p.alpha - 0.8743).abs() < 1e-2);
    }
}
