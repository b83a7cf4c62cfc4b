//! Signature of a simulated trajectory from its section returns.

use serde::{Deserialize, Serialize};

use pamflow_core::family::ManifoldGeometry;
use pamflow_core::pam::find_cycle;
use pamflow_core::{Error, Signature};

use crate::error::SimResult;
use crate::full::{detect_section_crossings, SectionSpec, TimeSeries};

/// `|∂z (F(x2, z) - F(x4, z))|` at `z = z0`, the rate at which the jump
/// point from `L4` moves across the fold level of `L2`.
pub const FOLD_LEVEL_SPLIT_RATE: f64 = 0.06379;

/// Half-width in `Z` of the neighbourhood of the jump discontinuity where
/// canard passages are possible.
pub fn canard_radius(eps: f64, delta: f64) -> f64 {
    2.0 * eps.powf(2.0 / 3.0) / (delta * FOLD_LEVEL_SPLIT_RATE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub z0: f64,
    pub delta: f64,
    pub eps: f64,
    pub section: SectionSpec,
    /// Returns discarded before the recurrence search.
    pub transient: usize,
    /// Absolute tolerance on `Z` for recurrence.
    pub recurrence_tol: f64,
    pub max_period: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            z0: 0.0,
            delta: 5e-3,
            eps: 1e-7,
            section: SectionSpec::default(),
            transient: 5,
            recurrence_tol: 1e-3,
            max_period: 64,
        }
    }
}

/// One oscillation: the stretch between consecutive section crossings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    pub t_start: f64,
    pub t_end: f64,
    /// Rescaled `Z = (z - z0)/δ` at the opening crossing.
    pub z_scaled: f64,
    pub min_x: f64,
    pub is_lao: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub signature: Signature,
    pub oscillations: Vec<Oscillation>,
    pub transient: usize,
    pub period: usize,
    pub lao_threshold: f64,
    pub canard_radius: f64,
    /// True if some return in the periodic regime lies within the canard radius.
    pub canard_hole: bool,
}

pub fn lao_threshold(geom: &ManifoldGeometry<f64>) -> f64 {
    0.5 * (geom.xhat4 + geom.x2)
}

/// Splits the series at section crossings and labels each oscillation.
pub fn oscillations(series: &TimeSeries, geom: &ManifoldGeometry<f64>, opts: &ClassifyOptions) -> Vec<Oscillation> {
    let crossings = detect_section_crossings(series, &opts.section);
    let threshold = lao_threshold(geom);
    crossings
        .windows(2)
        .map(|w| {
            let min_x = series.samples[w[0].step..=w[1].step]
                .iter()
                .map(|s| s.x)
                .fold(f64::INFINITY, f64::min);
            Oscillation {
                t_start: w[0].t,
                t_end: w[1].t,
                z_scaled: (w[0].z - opts.z0) / opts.delta,
                min_x,
                is_lao: min_x < threshold,
            }
        })
        .collect()
}

/// Signature of the periodic regime reached by the series.
pub fn classify_series(
    series: &TimeSeries,
    geom: &ManifoldGeometry<f64>,
    opts: &ClassifyOptions,
) -> SimResult<Classification> {
    let osc = oscillations(series, geom, opts);
    let tail = osc.get(opts.transient..).ok_or(Error::NotPeriodic)?;
    let zs: Vec<f64> = tail.iter().map(|o| o.z_scaled).collect();
    let (start, period) = find_cycle(&zs, opts.recurrence_tol, opts.max_period).ok_or(Error::NotPeriodic)?;
    let cycle = &tail[start..start + period];
    let pattern: Vec<bool> = cycle.iter().map(|o| o.is_lao).collect();
    let signature = Signature::from_cycle(&pattern)?;
    let radius = canard_radius(opts.eps, opts.delta);
    let canard_hole = tail[start..].iter().any(|o| o.z_scaled.abs() <= radius);
    Ok(Classification {
        signature,
        oscillations: osc,
        transient: opts.transient + start,
        period,
        lao_threshold: lao_threshold(geom),
        canard_radius: radius,
        canard_hole,
    })
}
