//! CSV and SVG output.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{SimError, SimResult};
use crate::full::{Crossing, TimeSeries};

fn io_err(e: impl std::fmt::Display) -> SimError {
    SimError::Io(e.to_string())
}

/// Columns `t,x,y,z`.
pub fn write_series_csv<W: Write>(series: &TimeSeries, out: W) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y", "z"]).map_err(io_err)?;
    for s in &series.samples {
        w.serialize((s.t, s.x, s.y, s.z)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Columns `index,t,y,z,Z`.
pub fn write_crossings_csv<W: Write>(crossings: &[Crossing], z0: f64, delta: f64, out: W) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "t", "y", "z", "Z"]).map_err(io_err)?;
    for (i, c) in crossings.iter().enumerate() {
        w.serialize((i, c.t, c.y, c.z, (c.z - z0) / delta)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// A named polyline for [`svg_plot`].
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points }
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
// Longer curves are thinned to about this many vertices.
const MAX_VERTICES: usize = 20_000;

fn bounds(curves: &[Curve]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in curves.iter().flat_map(|c| &c.points) {
        if x.is_finite() && y.is_finite() {
            b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
        }
    }
    if !b.0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let (x0, x1) = pad(b.0, b.1);
    let (y0, y1) = pad(b.2, b.3);
    (x0, x1, y0, y1)
}

/// Line plot with axes, tick labels at the extremes and a legend.
pub fn svg_plot(title: &str, x_label: &str, y_label: &str, curves: &[Curve]) -> String {
    let (x0, x1, y0, y1) = bounds(curves);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="25" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#, WIDTH / 2.0, escape(title));
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<path d="M{l},{t} L{l},{b} L{r},{b}" fill="none" stroke="black"/>"#);
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: &str| {
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}" font-family="sans-serif" font-size="12">{}</text>"#, escape(text));
    };
    label(&mut s, l, b + 18.0, "start", &format!("{x0:.4}"));
    label(&mut s, r, b + 18.0, "end", &format!("{x1:.4}"));
    label(&mut s, l - 6.0, b, "end", &format!("{y0:.4}"));
    label(&mut s, l - 6.0, t + 4.0, "end", &format!("{y1:.4}"));
    label(&mut s, WIDTH / 2.0, HEIGHT - 15.0, "middle", x_label);
    label(&mut s, 15.0, HEIGHT / 2.0, "middle", y_label);
    for (k, c) in curves.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let stride = c.points.len().div_ceil(MAX_VERTICES).max(1);
        let mut pts = String::new();
        for &(x, y) in c.points.iter().step_by(stride).filter(|(x, y)| x.is_finite() && y.is_finite()) {
            let _ = write!(pts, "{:.2},{:.2} ", px(x), py(y));
        }
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#, pts.trim_end());
        let ly = t + 16.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}"/>"#, r - 120.0, r - 100.0);
        label(&mut s, r - 95.0, ly + 4.0, "start", &c.label);
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Time series of `x`, `y`, `z` and the `(x, y)` and `(x, z)` projections.
pub fn series_plots(series: &TimeSeries) -> [(String, String); 2] {
    let col = |f: fn(&crate::full::Sample) -> (f64, f64)| series.samples.iter().map(f).collect::<Vec<_>>();
    let time = svg_plot(
        "time series",
        "t",
        "value",
        &[
            Curve::new("x", col(|s| (s.t, s.x))),
            Curve::new("y", col(|s| (s.t, s.y))),
            Curve::new("z", col(|s| (s.t, s.z))),
        ],
    );
    let proj = svg_plot(
        "projections",
        "x",
        "y, z",
        &[Curve::new("(x, y)", col(|s| (s.x, s.y))), Curve::new("(x, z)", col(|s| (s.x, s.z)))],
    );
    [("timeseries.svg".into(), time), ("projection.svg".into(), proj)]
}
