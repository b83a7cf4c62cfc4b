//! Plotting coordinates `x ↦ 2x/7`, `y ↦ 3y/2`, `z ↦ (z - z0)/δ`.

use crate::full::{Sample, TimeSeries};

const X_SCALE: f64 = 2.0 / 7.0;
const Y_SCALE: f64 = 1.5;

pub fn rescale_sample(s: &Sample, z0: f64, delta: f64) -> Sample {
    Sample { t: s.t, x: s.x * X_SCALE, y: s.y * Y_SCALE, z: (s.z - z0) / delta }
}

pub fn unscale_sample(s: &Sample, z0: f64, delta: f64) -> Sample {
    Sample { t: s.t, x: s.x / X_SCALE, y: s.y / Y_SCALE, z: z0 + delta * s.z }
}

pub fn visual_rescale(series: &TimeSeries, z0: f64, delta: f64) -> TimeSeries {
    map(series, |s| rescale_sample(s, z0, delta))
}

pub fn inverse_rescale(series: &TimeSeries, z0: f64, delta: f64) -> TimeSeries {
    map(series, |s| unscale_sample(s, z0, delta))
}

fn map(series: &TimeSeries, f: impl Fn(&Sample) -> Sample) -> TimeSeries {
    TimeSeries {
        samples: series.samples.iter().map(f).collect(),
        event_marks: series.event_marks.clone(),
        slopes: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let s = Sample { t: 0.0, x: 3.5, y: 2.0, z: 0.7 };
        let r = rescale_sample(&s, 0.0, 1.0);
        assert_eq!(r.x, 1.0);
        assert_eq!(r.y, 3.0);
        assert_eq!(r.z, 0.7);
    }

    #[test]
    fn round_trip() {
        let series = TimeSeries {
            samples: (0..50)
                .map(|k| {
                    let t = k as f64 * 0.37;
                    Sample { t, x: t.sin() * 2.3, y: t.cos() - 0.4, z: 1e-3 * t.sin() }
                })
                .collect(),
            event_marks: vec![3, 9],
            slopes: Vec::new(),
        };
        let back = inverse_rescale(&visual_rescale(&series, 0.01, 5e-3), 0.01, 5e-3);
        for (a, b) in series.samples.iter().zip(&back.samples) {
            for (u, v) in [(a.x, b.x), (a.y, b.y), (a.z, b.z)] {
                assert!((u - v).abs() <= 4.0 * f64::EPSILON * u.abs().max(1.0));
            }
        }
        assert_eq!(back.event_marks, series.event_marks);
    }
}
