//! Published reference data and the checks that reproduce it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::RhoSpec;
use crate::pam::{OrbitOptions, Pam, Signature, TransformedPam};
use crate::synthesis::synthesize;

/// Initial conditions used to read off signatures.
pub const SIGNATURE_SEEDS: [f64; 2] = [-0.5, 0.5];

/// Target map and printed `(α, β, κ, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisRow {
    pub signature: &'static str,
    pub pam: [f64; 4],
    pub params: [f64; 4],
}

const fn row(signature: &'static str, pam: [f64; 4], params: [f64; 4]) -> SynthesisRow {
    SynthesisRow { signature, pam, params }
}

/// Sixteen maps with simple signatures and their printed parameters.
pub const SYNTHESIS_ROWS: [SynthesisRow; 16] = [
    row("1^1", [0.3, 1.0, 0.9, -2.0], [0.8743, 0.0240, 27.2674, -64.5764]),
    row("1^2", [0.3, 3.0, 0.9, -2.0], [0.8743, 0.0240, 28.2364, -73.1866]),
    row("1^3", [0.3, 7.0, 0.9, -2.0], [0.8743, 0.0240, 30.1744, -90.4070]),
    row("1^4", [0.3, 10.0, 0.9, -2.0], [0.8743, 0.0240, 31.6279, -103.3223]),
    row("1^5", [0.3, 12.0, 0.9, -2.0], [0.8743, 0.0240, 32.5969, -111.9325]),
    row("1^6", [0.3, 15.0, 0.9, -2.0], [0.8743, 0.0240, 34.0504, -124.8478]),
    row("1^7", [0.3, 20.0, 0.9, -2.0], [0.8743, 0.0240, 36.4729, -146.3733]),
    row("1^8", [0.3, 25.0, 0.9, -2.0], [0.8743, 0.0240, 38.8954, -167.8987]),
    row("1^1", [0.9, 3.0, 0.4, -3.0], [-0.5065, 1.0238, 3.2091, -7.7202]),
    row("2^1", [0.9, 1.5, 0.4, -3.0], [-0.5065, 1.0238, 3.9766, -4.4118]),
    row("3^1", [0.9, 1.0, 0.4, -3.0], [-0.5065, 1.0238, 4.2325, -3.3088]),
    row("4^1", [0.9, 0.7, 0.4, -3.0], [-0.5065, 1.0238, 4.3860, -2.6471]),
    row("5^1", [0.9, 0.5, 0.4, -3.0], [-0.5065, 1.0238, 4.4883, -2.2059]),
    row("6^1", [0.9, 0.4, 0.4, -3.0], [-0.5065, 1.0238, 4.5395, -1.9853]),
    row("7^1", [0.9, 0.3, 0.4, -3.0], [-0.5065, 1.0238, 4.6162, -1.7647]),
    row("8^1", [0.9, 0.25, 0.4, -3.0], [-0.5065, 1.0238, 4.6418, -1.6544]),
];

/// Transformed map `(a, b, l)`, printed `μ` window and the `μ` realising the signature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub signature: &'static str,
    pub a: f64,
    pub b: f64,
    pub l: f64,
    pub predicted: [f64; 2],
    pub actual_mu: f64,
}

const fn brow(signature: &'static str, a: f64, b: f64, l: f64, predicted: [f64; 2], actual_mu: f64) -> BoundsRow {
    BoundsRow { signature, a, b, l, predicted, actual_mu }
}

pub const BOUNDS_ROWS: [BoundsRow; 11] = [
    brow("1^2", 0.3, 0.9, -5.0, [2.9262, 3.5055], 3.0),
    brow("1^3", 0.3, 0.9, -9.0, [6.5313, 7.0921], 7.0),
    brow("1^4", 0.3, 0.9, -11.0, [8.8076, 9.2376], 9.0),
    brow("1^8", 0.3, 0.9, -2.28, [2.0932, 2.1197], 2.1),
    brow("1^9", 0.3, 0.9, -2.68, [2.4955, 2.5205], 2.5),
    brow("1^25", 0.5, 0.94, -15.25, [14.9889, 15.0064], 15.0),
    brow("2^1", 0.9, 0.8, -7.2, [2.1520, 2.4732], 2.2),
    brow("3^1", 0.9, 0.8, -6.5, [1.3778, 1.5678], 1.5),
    brow("6^1", 0.9, 0.8, -5.6, [0.5704, 0.6410], 0.6),
    brow("8^1", 0.9, 0.9, -6.5, [0.4675, 0.5075], 0.5),
    brow("9^1", 0.9, 0.9, -9.6, [0.5710, 0.6344], 0.6),
];

/// Endpoints of a crossover sweep and a printed interior point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverCase {
    pub signature: &'static str,
    pub start: [f64; 4],
    pub end: [f64; 4],
    pub start_kappa_lambda: [f64; 2],
    pub end_kappa_lambda: [f64; 2],
    pub alpha_beta: [f64; 2],
    pub mu: f64,
    pub point: [f64; 2],
}

pub const CROSSOVER_CASES: [CrossoverCase; 2] = [
    CrossoverCase {
        signature: "1^4 1^5",
        start: [0.9, 6.0, 0.85, -1.0],
        end: [0.9, 7.2, 0.85, -1.0],
        start_kappa_lambda: [7.7321, -233.3068],
        end_kappa_lambda: [7.9239, -275.3021],
        alpha_beta: [-0.0220, 0.1747],
        mu: 6.5,
        point: [7.8120, -250.8049],
    },
    CrossoverCase {
        signature: "2^1 3^1",
        start: [0.9, 2.2, 0.8, -5.0],
        end: [0.9, 1.5, 0.8, -5.0],
        start_kappa_lambda: [24.4916, -96.1819],
        end_kappa_lambda: [24.5673, -81.8569],
        alpha_beta: [-0.0610, 0.2430],
        mu: 1.8,
        point: [24.5348, -87.9962],
    },
];

/// Signature of the settled orbit from each seed; errors if the seeds disagree.
pub fn pam_signature(pam: &Pam) -> Result<Signature> {
    let opts = OrbitOptions::default();
    let mut found: Option<Signature> = None;
    for z0 in SIGNATURE_SEEDS {
        let sig = pam.orbit_signature(z0, &opts)?;
        match &found {
            Some(prev) if *prev != sig => {
                return Err(Error::InvalidSignature(format!("seeds disagree: {prev} vs {sig}")));
            }
            _ => found = Some(sig),
        }
    }
    Ok(found.expect("at least one seed"))
}

/// Interval predicted for a simple signature: `(μ2, μ1]` for `L^1`, `[at least, at most)` for `1^s`.
pub fn predicted_window(sig: &Signature, tp: &TransformedPam<f64>) -> Result<crate::pam::MuInterval<f64>> {
    match sig.segments() {
        [(l, 1)] => tp.lao_window(*l),
        [(1, s)] => tp.sao_window(*s),
        _ => Err(Error::InvalidSignature(format!("{sig} is not of the form L^1 or 1^s"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisRowReport {
    pub signature: String,
    pub pam: [f64; 4],
    pub printed: [f64; 4],
    pub computed: Option<[f64; 4]>,
    pub max_abs_error: Option<f64>,
    pub params_ok: bool,
    pub detected_signature: Option<String>,
    pub signature_ok: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRowReport {
    pub signature: String,
    pub printed: [f64; 2],
    pub computed: Option<[f64; 2]>,
    pub max_endpoint_error: Option<f64>,
    pub interval_ok: bool,
    pub actual_mu: f64,
    pub actual_inside: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesReport {
    pub param_tol: f64,
    pub bounds_tol: f64,
    pub synthesis: Vec<SynthesisRowReport>,
    pub bounds: Vec<BoundsRowReport>,
    pub params_passed: usize,
    pub signatures_passed: usize,
    pub intervals_passed: usize,
    pub memberships_passed: usize,
}

impl TablesReport {
    pub fn all_passed(&self) -> bool {
        self.params_passed == self.synthesis.len()
            && self.signatures_passed == self.synthesis.len()
            && self.intervals_passed == self.bounds.len()
            && self.memberships_passed == self.bounds.len()
    }
}

pub fn check_synthesis_row(row: &SynthesisRow, tol: f64) -> SynthesisRowReport {
    let [a11, a12, a21, a22] = row.pam;
    let mut rep = SynthesisRowReport {
        signature: row.signature.to_string(),
        pam: row.pam,
        printed: row.params,
        computed: None,
        max_abs_error: None,
        params_ok: false,
        detected_signature: None,
        signature_ok: false,
        error: None,
    };
    let pam = match Pam::new(a11, a12, a21, a22) {
        Ok(p) => p,
        Err(e) => {
            rep.error = Some(e.to_string());
            return rep;
        }
    };
    match synthesize(&pam, RhoSpec::FixedRational) {
        Ok(p) => {
            let c = [p.alpha, p.beta, p.kappa, p.lambda];
            let err = c.iter().zip(row.params).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            rep.computed = Some(c);
            rep.max_abs_error = Some(err);
            rep.params_ok = err <= tol;
        }
        Err(e) => rep.error = Some(e.to_string()),
    }
    match pam_signature(&pam) {
        Ok(sig) => {
            rep.signature_ok = row.signature.parse::<Signature>().map(|s| s == sig).unwrap_or(false);
            rep.detected_signature = Some(sig.to_string());
        }
        Err(e) => {
            rep.error.get_or_insert(e.to_string());
        }
    }
    rep
}

pub fn check_bounds_row(row: &BoundsRow, tol: f64) -> BoundsRowReport {
    let mut rep = BoundsRowReport {
        signature: row.signature.to_string(),
        printed: row.predicted,
        computed: None,
        max_endpoint_error: None,
        interval_ok: false,
        actual_mu: row.actual_mu,
        actual_inside: false,
        error: None,
    };
    let tp = TransformedPam { a: row.a, b: row.b, mu: row.actual_mu, l: row.l };
    let window = row
        .signature
        .parse::<Signature>()
        .and_then(|sig| predicted_window(&sig, &tp));
    match window {
        Ok(w) => {
            let err = (w.lower - row.predicted[0]).abs().max((w.upper - row.predicted[1]).abs());
            rep.computed = Some([w.lower, w.upper]);
            rep.max_endpoint_error = Some(err);
            rep.interval_ok = err <= tol;
            rep.actual_inside = w.contains(row.actual_mu);
        }
        Err(e) => rep.error = Some(e.to_string()),
    }
    rep
}

/// Runs every row of both tables; failures are recorded, not raised.
pub fn verify_tables(param_tol: f64, bounds_tol: f64) -> TablesReport {
    let synthesis: Vec<_> = SYNTHESIS_ROWS
        .par_iter()
        .map(|r| check_synthesis_row(r, param_tol))
        .collect();
    let bounds: Vec<_> = BOUNDS_ROWS
        .par_iter()
        .map(|r| check_bounds_row(r, bounds_tol))
        .collect();
    TablesReport {
        param_tol,
        bounds_tol,
        params_passed: synthesis.iter().filter(|r| r.params_ok).count(),
        signatures_passed: synthesis.iter().filter(|r| r.signature_ok).count(),
        intervals_passed: bounds.iter().filter(|r| r.interval_ok).count(),
        memberships_passed: bounds.iter().filter(|r| r.actual_inside).count(),
        synthesis,
        bounds,
    }
}
