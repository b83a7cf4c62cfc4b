//! Integration of the full three-dimensional system in slow time,
//!
//! ```text
//! ε ẋ = y - F(x, z),   ẏ = J(x),   ż = δ G(x) + (z - z0) H(x),
//! ```
//!
//! and sampling of its returns to a section on the fast fall from `L4`.

use serde::{Deserialize, Serialize};

use pamflow_core::family::{CanonicalField, CanonicalParams};
use pamflow_core::numeric::roots::refine_bracket;

use crate::error::{SimError, SimResult};
use crate::rodas::{hermite, Rodas4, StepControl, StiffSystem};

/// Plane `{x = x_section}` crossed in the direction of `direction`'s sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub x_section: f64,
    pub direction: i8,
}

impl Default for SectionSpec {
    /// `x = 0.5`, decreasing: midway between the folds at `x3 = 0` and
    /// `x4 = 1`, crossed only by the fast fall from `L4`.
    fn default() -> Self {
        Self { x_section: 0.5, direction: -1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub eps: f64,
    pub delta: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_slow_time: f64,
    /// Start state; `None` starts on the right sheet at `x = 1.3`, `Z = -1/2`.
    pub initial_state: Option<[f64; 3]>,
    pub section: SectionSpec,
    /// Stop after this many section crossings.
    pub max_crossings: Option<usize>,
    pub max_steps: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            eps: 1e-7,
            delta: 5e-3,
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_slow_time: 200.0,
            initial_state: None,
            section: SectionSpec::default(),
            max_crossings: None,
            max_steps: 20_000_000,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> SimResult<()> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if !(self.eps > 0.0 && self.eps <= 1e-3) {
            return bad(format!("eps must lie in (0, 1e-3], got {}", self.eps));
        }
        if !(self.delta > 0.0 && self.delta <= 0.1) {
            return bad(format!("delta must lie in (0, 0.1], got {}", self.delta));
        }
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(1e-14..=1e-6).contains(&v) {
                return bad(format!("{name} must lie in [1e-14, 1e-6], got {v}"));
            }
        }
        if !(self.max_slow_time > 0.0) {
            return bad("max_slow_time must be positive".into());
        }
        if self.section.direction == 0 {
            return bad("section direction must be nonzero".into());
        }
        Ok(())
    }

    pub fn start(&self, field: &CanonicalField<f64>) -> [f64; 3] {
        self.initial_state.unwrap_or_else(|| {
            let z0 = field.params().z0;
            let z = z0 - 0.5 * self.delta;
            [1.3, field.f(1.3, z0), z]
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Accepted integrator states, with slopes kept for interpolation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub samples: Vec<Sample>,
    /// Index `i` such that a section crossing lies in `(t_i, t_{i+1}]`.
    pub event_marks: Vec<usize>,
    #[serde(skip)]
    pub slopes: Vec<[f64; 3]>,
}

impl TimeSeries {
    fn push(&mut self, t: f64, y: [f64; 3], f: [f64; 3]) {
        self.samples.push(Sample { t, x: y[0], y: y[1], z: y[2] });
        self.slopes.push(f);
    }

    fn state(&self, i: usize) -> [f64; 3] {
        let s = &self.samples[i];
        [s.x, s.y, s.z]
    }

    /// State at `t` inside step `i` by cubic Hermite (or linear without slopes).
    pub fn interpolate(&self, i: usize, t: f64) -> [f64; 3] {
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        if self.slopes.len() == self.samples.len() {
            hermite(a.t, &self.state(i), &self.slopes[i], b.t, &self.state(i + 1), &self.slopes[i + 1], t)
        } else {
            let s = (t - a.t) / (b.t - a.t);
            let (ya, yb) = (self.state(i), self.state(i + 1));
            [0, 1, 2].map(|k| ya[k] + s * (yb[k] - ya[k]))
        }
    }
}

/// Section crossing: time and `(y, z)` at `x = x_section`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub y: f64,
    pub z: f64,
    pub step: usize,
}

fn crosses(sec: &SectionSpec, xa: f64, xb: f64) -> bool {
    let (da, db) = (xa - sec.x_section, xb - sec.x_section);
    if sec.direction < 0 {
        da > 0.0 && db <= 0.0
    } else {
        da < 0.0 && db >= 0.0
    }
}

fn refine_crossing(series: &TimeSeries, i: usize, sec: &SectionSpec) -> Crossing {
    let (ta, tb) = (series.samples[i].t, series.samples[i + 1].t);
    let g = |t: f64| series.interpolate(i, t)[0] - sec.x_section;
    let xtol = 1e-8f64.min(1e-3 * (tb - ta)).max(f64::EPSILON * tb.abs());
    let t = refine_bracket(g, ta, tb, xtol).unwrap_or(tb);
    let s = series.interpolate(i, t);
    Crossing { t, y: s[1], z: s[2], step: i }
}

/// Crossings of `sec` in the recorded series, refined on the interpolant.
pub fn detect_section_crossings(series: &TimeSeries, sec: &SectionSpec) -> Vec<Crossing> {
    series
        .samples
        .windows(2)
        .enumerate()
        .filter(|(_, w)| crosses(sec, w[0].x, w[1].x))
        .map(|(i, _)| refine_crossing(series, i, sec))
        .collect()
}

struct SlowSystem<'a> {
    field: &'a CanonicalField<f64>,
    eps: f64,
    delta: f64,
}

impl StiffSystem<f64, 3> for SlowSystem<'_> {
    fn rhs(&self, y: &[f64; 3]) -> SimResult<[f64; 3]> {
        Ok(self.field.slow_rhs(*y, self.eps, self.delta)?)
    }
    fn jacobian(&self, y: &[f64; 3]) -> SimResult<[[f64; 3]; 3]> {
        Ok(self.field.slow_jacobian(*y, self.eps, self.delta)?)
    }
}

/// Outcome of [`integrate_full`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullRun {
    pub series: TimeSeries,
    pub crossings: Vec<Crossing>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Largest change of `x` between stored samples while on a slow sheet.
const MAX_SAMPLE_DX: f64 = 0.05;

pub fn integrate_full(params: &CanonicalParams<f64>, cfg: &SimConfig) -> SimResult<FullRun> {
    cfg.validate()?;
    let field = CanonicalField::new(*params)?;
    integrate_field(&field, cfg)
}

pub fn integrate_field(field: &CanonicalField<f64>, cfg: &SimConfig) -> SimResult<FullRun> {
    cfg.validate()?;
    let sys = SlowSystem { field, eps: cfg.eps, delta: cfg.delta };
    let ctl = StepControl {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        h_init: cfg.eps,
        ..Default::default()
    };
    let y0 = cfg.start(field);
    let mut st = Rodas4::new(&sys, 0.0, y0, ctl)?;
    let mut series = TimeSeries::default();
    series.push(0.0, st.y, st.f);
    let mut crossings = Vec::new();
    while st.t < cfg.max_slow_time {
        if st.accepted >= cfg.max_steps {
            return Err(SimError::TooManySteps(cfg.max_steps));
        }
        let step = st.step(&sys, cfg.max_slow_time)?;
        if !step.y1.iter().all(|v| v.is_finite()) {
            return Err(SimError::NonFiniteState { t: step.t1 });
        }
        // Densify long steps so slow segments are resolved in the output.
        let dx = (step.y1[0] - step.y0[0]).abs();
        if dx > MAX_SAMPLE_DX && (step.f1[0] - step.f0[0]).abs() * cfg.eps < 1.0 {
            let n = (dx / MAX_SAMPLE_DX).ceil() as usize;
            for k in 1..n {
                let t = step.t0 + (step.t1 - step.t0) * k as f64 / n as f64;
                let y = step.interpolate(t);
                let f = sys.rhs(&y)?;
                series.push(t, y, f);
            }
        }
        series.push(step.t1, step.y1, step.f1);
        let i = series.samples.len() - 2;
        if crosses(&cfg.section, series.samples[i].x, series.samples[i + 1].x) {
            series.event_marks.push(i);
            crossings.push(refine_crossing(&series, i, &cfg.section));
            if cfg.max_crossings.is_some_and(|n| crossings.len() >= n) {
                break;
            }
        }
    }
    Ok(FullRun {
        series,
        crossings,
        accepted_steps: st.accepted,
        rejected_steps: st.rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pamflow_core::family::RhoSpec;

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        assert!(SimConfig { eps: 1e-2, ..Default::default() }.validate().is_err());
        assert!(SimConfig { rel_tol: 1e-3, ..Default::default() }.validate().is_err());
        assert!(SimConfig { delta: 0.5, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn constant_series_has_no_crossings() {
        let mut s = TimeSeries::default();
        for k in 0..10 {
            s.push(k as f64, [1.2, 0.0, 0.0], [0.0; 3]);
        }
        assert!(detect_section_crossings(&s, &SectionSpec::default()).is_empty());
    }

    #[test]
    fn z_frozen_without_alpha_beta() {
        let params = CanonicalParams::new(0.0, 0.0, 5.0, 2.0, RhoSpec::FixedRational);
        let cfg = SimConfig { eps: 1e-4, delta: 1e-2, max_slow_time: 3.0, ..Default::default() };
        let run = integrate_full(&params, &cfg).unwrap();
        let z0 = run.series.samples[0].z;
        assert!(run.series.samples.iter().all(|s| (s.z - z0).abs() <= 1e-11));
        assert!(!run.crossings.is_empty());
    }

    #[test]
    fn slow_manifold_attraction_with_eps() {
        let params = CanonicalParams::new(0.8743, 0.0240, 27.2674, -64.5764, RhoSpec::FixedRational);
        let mut dist = Vec::new();
        for eps in [1e-4, 1e-5, 1e-6] {
            let cfg = SimConfig { eps, delta: 1e-2, max_slow_time: 0.4, ..Default::default() };
            let run = integrate_full(&params, &cfg).unwrap();
            let field = CanonicalField::new(params).unwrap();
            // Sheet S_a3 slow descent after the initial layer: x in (1.05, 1.25).
            let d = run
                .series
                .samples
                .iter()
                .filter(|s| s.t > 0.05 && s.x > 1.05 && s.x < 1.25)
                .map(|s| (s.y - field.f(s.x, s.z)).abs())
                .fold(0.0, f64::max);
            dist.push(d);
        }
        assert!(dist[0] > dist[1] && dist[1] > dist[2], "{dist:?}");
    }
}
