use serde::{Deserialize, Serialize};

use super::{PamCoefficients, Signature};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Settings for [`iterate_orbit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitOptions {
    pub max_iters: usize,
    /// Absolute recurrence tolerance `|Z_{n+p} - Z_n|`.
    pub tol: f64,
    /// Largest period searched for.
    pub max_period: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            tol: 1e-10,
            max_period: 2048,
        }
    }
}

/// Recorded iterates of the map together with the detected periodic regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult<T> {
    pub iterates: Vec<T>,
    pub transient_length: usize,
    pub period: Option<usize>,
    pub converged: bool,
}

impl<T: Real> OrbitResult<T> {
    /// One period of the settled orbit, starting right after the transient.
    pub fn cycle(&self) -> Option<&[T]> {
        let p = self.period?;
        self.iterates
            .get(self.transient_length..self.transient_length + p)
    }
}

// Period search runs every CHECK_EVERY iterates.
const CHECK_EVERY: usize = 16;

/// Iterates `Z_{n+1} = M(Z_n)` until a period is confirmed or `max_iters` is reached.
///
/// A period `p` is accepted when `|Z_{k+p} - Z_k| <= tol` holds for `3p + 1`
/// consecutive `k` at the end of the record; the smallest such `p` wins.
/// Failing to find one is not an error: the result has `converged = false`.
pub fn iterate_orbit<T: Real>(
    pam: &PamCoefficients<T>,
    z0: T,
    opts: &OrbitOptions,
) -> Result<OrbitResult<T>> {
    if z0.abs() <= T::lit(super::DISCONTINUITY_GUARD) {
        return Err(Error::DiscontinuityHit(z0.as_f64()));
    }
    let tol = T::lit(opts.tol);
    let mut iterates = Vec::with_capacity(opts.max_iters.min(4096) + 1);
    iterates.push(z0);
    let mut z = z0;
    for n in 1..=opts.max_iters {
        z = pam.eval(z)?;
        iterates.push(z);
        if !z.is_finite() {
            break;
        }
        if n % CHECK_EVERY == 0 || n == opts.max_iters {
            if let Some(p) = find_period(&iterates, tol, opts.max_period) {
                let transient_length = transient_start(&iterates, p, tol);
                return Ok(OrbitResult {
                    iterates,
                    transient_length,
                    period: Some(p),
                    converged: true,
                });
            }
        }
    }
    Ok(OrbitResult {
        iterates,
        transient_length: 0,
        period: None,
        converged: false,
    })
}

fn recurs<T: Real>(zs: &[T], k: usize, p: usize, tol: T) -> bool {
    (zs[k + p] - zs[k]).abs() <= tol
}

fn find_period<T: Real>(zs: &[T], tol: T, max_period: usize) -> Option<usize> {
    let last = zs.len() - 1;
    let limit = max_period.min(last / 4);
    (1..=limit).find(|&p| {
        let from = last - 4 * p;
        (from..=last - p).all(|k| recurs(zs, k, p, tol))
    })
}

fn transient_start<T: Real>(zs: &[T], p: usize, tol: T) -> usize {
    let mut m = zs.len() - 1 - p;
    while m > 0 && recurs(zs, m - 1, p, tol) {
        m -= 1;
    }
    m
}

/// Finds the smallest period of the tail of `zs` (same acceptance rule as
/// [`iterate_orbit`]) and the index where the periodic regime starts.
pub fn find_cycle<T: Real>(zs: &[T], tol: T, max_period: usize) -> Option<(usize, usize)> {
    if zs.len() < 5 {
        return None;
    }
    let p = find_period(zs, tol, max_period)?;
    Some((transient_start(zs, p, tol), p))
}

/// Classifies one period of a converged orbit: `Z < 0` is an LAO, `Z > 0` an SAO.
pub fn detect_signature<T: Real>(orbit: &OrbitResult<T>) -> Result<Signature> {
    if !orbit.converged {
        return Err(Error::NotPeriodic);
    }
    let cycle = orbit.cycle().ok_or(Error::NotPeriodic)?;
    let pattern: Vec<bool> = cycle.iter().map(|&z| z < T::zero()).collect();
    Signature::from_cycle(&pattern)
}

impl<T: Real> PamCoefficients<T> {
    /// Iterates from `z0` and returns the signature of the settled orbit.
    pub fn orbit_signature(&self, z0: T, opts: &OrbitOptions) -> Result<Signature> {
        detect_signature(&iterate_orbit(self, z0, opts)?)
    }
}
