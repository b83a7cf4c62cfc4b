//! Finite-δ hybrid of reduced flow and instantaneous jumps.
//!
//! Between jumps the state lies on an attracting sheet `y = F(x, z)` and,
//! with `Z = (z - z0)/δ` and `x` as independent variable,
//!
//! ```text
//! dZ/dx = (G + Z H) F_x(x, z) / (J - δ F_z(x) (G + Z H)),   z = z0 + δ Z.
//! ```
//!
//! At `δ = 0` this is the linear equation behind the associated map.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use pamflow_core::family::CanonicalParams;
use pamflow_core::numeric::roots::refine_bracket;
use pamflow_core::pam::{find_cycle, DISCONTINUITY_GUARD};
use pamflow_core::{CanonicalField, Error, Signature};

use crate::error::SimResult;
use crate::explicit::dopri5;

const REL_TOL: f64 = 1e-11;
const ABS_TOL: f64 = 1e-12;
const FOLD_BRACKET: f64 = 0.05;
const ROOT_TOL: f64 = 1e-13;

/// Z at each jump from `L4` (starting with `Z0`) and the branch taken there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridRun {
    pub delta: f64,
    pub zs: Vec<f64>,
    /// `true` where the jump from `L4` lands on the outer sheet (an LAO).
    pub branches: Vec<bool>,
    pub signature: Option<Signature>,
    pub period: Option<usize>,
}

struct Reduced<'a> {
    field: &'a CanonicalField<f64>,
    z0: f64,
    delta: f64,
}

impl Reduced<'_> {
    fn z(&self, zs: f64) -> f64 {
        self.z0 + self.delta * zs
    }

    fn slope(&self, x: f64, zs: f64) -> SimResult<f64> {
        let (g, h) = self.field.gh(x)?;
        let m = self.field.manifold();
        let drive = g + zs * h;
        let den = self.field.j(x) - self.delta * m.fz(x) * drive;
        Ok(drive * m.fx(x, self.z(zs)) / den)
    }

    /// Fold near `guess` at the current `z`.
    fn fold(&self, guess: f64, zs: f64) -> SimResult<f64> {
        if self.delta == 0.0 {
            return Ok(guess);
        }
        let z = self.z(zs);
        let m = self.field.manifold();
        refine_bracket(|x| m.fx(x, z), guess - FOLD_BRACKET, guess + FOLD_BRACKET, ROOT_TOL)
            .ok_or_else(|| Error::GeometryFailure(format!("fold near {guess} lost at z = {z}")).into())
    }

    /// Follows the sheet from `x_start` to the fold near `fold_guess`.
    fn slide(&self, x_start: f64, fold_guess: f64, zs: f64) -> SimResult<(f64, f64)> {
        let rhs = |x: f64, y: &[f64; 1]| Ok([self.slope(x, y[0])?]);
        let mut zs = dopri5(rhs, x_start, [zs], fold_guess, REL_TOL, ABS_TOL)?[0];
        let mut x_end = fold_guess;
        if self.delta != 0.0 {
            // The fold position depends on z; finish on the fold at the final z.
            for _ in 0..4 {
                let fold = self.fold(fold_guess, zs)?;
                if (fold - x_end).abs() <= ROOT_TOL {
                    break;
                }
                zs = dopri5(rhs, x_end, [zs], fold, REL_TOL, ABS_TOL)?[0];
                x_end = fold;
            }
        }
        Ok((x_end, zs))
    }

    fn land(&self, found: Option<f64>, what: &str, zs: f64) -> SimResult<f64> {
        found.ok_or_else(|| Error::GeometryFailure(format!("no landing point on {what} at Z = {zs}")).into())
    }

    /// One return: jump from `L4` at `zs` through to the next arrival at `L4`.
    fn step(&self, zs: f64) -> SimResult<(f64, bool)> {
        if zs.abs() <= DISCONTINUITY_GUARD {
            return Err(Error::DiscontinuityHit(zs).into());
        }
        let g = self.field.geometry();
        let m = self.field.manifold();
        let z = self.z(zs);
        let x4 = self.fold(g.x4, zs)?;
        let y4 = m.f(x4, z);
        let lao = zs < 0.0;
        let (x_mid, zs) = if lao {
            let x1 = self.fold(g.x1, zs)?;
            let land = self.land(m.left_sheet_point(y4, z, x1), "the outer sheet", zs)?;
            self.slide(land, g.x1, zs)?
        } else {
            let x2 = self.fold(g.x2, zs)?;
            let x3 = self.fold(g.x3, zs)?;
            let land = refine_bracket(|x| m.f(x, z) - y4, x2, x3, ROOT_TOL);
            let land = self.land(land, "the middle sheet", zs)?;
            self.slide(land, g.x3, zs)?
        };
        let z = self.z(zs);
        let y = m.f(x_mid, z);
        let x4 = self.fold(g.x4, zs)?;
        let land = self.land(m.right_sheet_point(y, z, x4), "the right sheet", zs)?;
        let (_, zs) = self.slide(land, g.x4, zs)?;
        Ok((zs, lao))
    }
}

/// Runs `n_returns` returns of the hybrid system from `Z0` at `L4`.
pub fn hybrid_simulate(params: &CanonicalParams<f64>, delta: f64, z_start: f64, n_returns: usize) -> SimResult<HybridRun> {
    let field = CanonicalField::new(*params)?;
    hybrid_with_field(&field, delta, z_start, n_returns)
}

pub fn hybrid_with_field(field: &CanonicalField<f64>, delta: f64, z_start: f64, n_returns: usize) -> SimResult<HybridRun> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be non-negative, got {delta}")).into());
    }
    let sys = Reduced { field, z0: field.params().z0, delta };
    let mut zs = vec![z_start];
    let mut branches = Vec::with_capacity(n_returns);
    for _ in 0..n_returns {
        let (next, lao) = sys.step(*zs.last().unwrap())?;
        branches.push(lao);
        zs.push(next);
    }
    let cycle = find_cycle(&zs, 1e-8, 256);
    let signature = match cycle {
        Some((start, p)) => Some(Signature::from_cycle(&branches[start..start + p])?),
        None => None,
    };
    Ok(HybridRun {
        delta,
        zs,
        branches,
        signature,
        period: cycle.map(|(_, p)| p),
    })
}

/// Deviation of hybrid `Z` iterates from the `δ = 0` run, per `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaConvergence {
    pub deltas: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln error` against `ln δ`.
    pub order: f64,
}

pub fn delta_convergence(
    params: &CanonicalParams<f64>,
    z_start: f64,
    n_returns: usize,
    deltas: &[f64],
) -> SimResult<DeltaConvergence> {
    let field = CanonicalField::new(*params)?;
    let exact = hybrid_with_field(&field, 0.0, z_start, n_returns)?;
    let errors = deltas
        .par_iter()
        .map(|&d| {
            let run = hybrid_with_field(&field, d, z_start, n_returns)?;
            Ok(run.zs.iter().zip(&exact.zs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        })
        .collect::<SimResult<Vec<f64>>>()?;
    Ok(DeltaConvergence {
        deltas: deltas.to_vec(),
        order: loglog_slope(deltas, &errors),
        errors,
    })
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use pamflow_core::assoc::associated_pam;
    use pamflow_core::family::RhoSpec;

    fn row_1_1() -> CanonicalParams<f64> {
        CanonicalParams::new(0.8743, 0.0240, 27.2674, -64.5764, RhoSpec::FixedRational)
    }

    #[test]
    fn zero_delta_reproduces_map() {
        let p = row_1_1();
        let field = CanonicalField::new(p).unwrap();
        let pam = associated_pam(&p, field.geometry()).unwrap();
        let run = hybrid_simulate(&p, 0.0, -0.5, 40).unwrap();
        let mut z = -0.5;
        for &got in &run.zs[1..] {
            z = pam.eval(z).unwrap();
            assert!((got - z).abs() < 1e-8, "{got} vs {z}");
        }
        assert_eq!(run.signature.unwrap().to_string(), "1^1");
    }

    #[test]
    fn first_order_in_delta() {
        let c = delta_convergence(&row_1_1(), -0.5, 6, &[1e-2, 5e-3, 1e-3]).unwrap();
        assert!(c.order >= 0.9, "{c:?}");
    }

    #[test]
    fn discontinuity_rejected() {
        assert!(hybrid_simulate(&row_1_1(), 5e-3, 0.0, 3).is_err());
        assert!(hybrid_simulate(&row_1_1(), -1.0, 0.5, 3).is_err());
    }

    #[test]
    fn loglog_fit() {
        let xs = [1.0, 2.0, 4.0];
        let ys = xs.map(|x: f64| 3.0 * x * x);
        assert!((loglog_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }
}
