//! Signature sweeps along a straight line in `(κ, λ)` at fixed `(α, β)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assoc::{associated_pam_with, SegmentMethod};
use crate::error::{Error, Result};
use crate::family::{CanonicalField, CanonicalParams, Primitive, RhoSpec};
use crate::pam::Pam;
use crate::synthesis::synthesize;
use crate::tables::pam_signature;

/// Largest `(α, β)` mismatch between endpoints accepted as "shared".
pub const SHARED_SLOPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverSample {
    pub t: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub pam: Option<Pam>,
    pub signature: Option<String>,
    pub error: Option<String>,
}

/// Maximal run of consecutive samples sharing one signature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureWindow {
    pub signature: String,
    pub t_start: f64,
    pub t_end: f64,
    pub kappa: [f64; 2],
    pub lambda: [f64; 2],
    pub mu: [f64; 2],
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverScan {
    pub alpha: f64,
    pub beta: f64,
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub samples: Vec<CrossoverSample>,
    pub windows: Vec<SignatureWindow>,
}

impl CrossoverScan {
    /// Windows whose signature equals `sig` (compared in canonical form).
    pub fn windows_for(&self, sig: &crate::pam::Signature) -> Vec<&SignatureWindow> {
        self.windows
            .iter()
            .filter(|w| w.signature.parse::<crate::pam::Signature>().is_ok_and(|s| &s == sig))
            .collect()
    }
}

/// Associated PAM and its signature at one parameter point.
pub fn signature_at(params: &CanonicalParams<f64>) -> Result<(Pam, crate::pam::Signature)> {
    let prim = Primitive::shared(params.rho, params.z0)?;
    let geom = *prim.geometry();
    let field = CanonicalField::with_primitive(*params, prim);
    let pam = associated_pam_with(&field, &geom, SegmentMethod::ClosedForm)?;
    let sig = pam_signature(&pam)?;
    Ok((pam, sig))
}

/// Sweeps `n >= 2` evenly spaced points from `start` to `end` in `(κ, λ)`.
pub fn scan_kappa_lambda(
    alpha: f64,
    beta: f64,
    start: [f64; 2],
    end: [f64; 2],
    rho: RhoSpec<f64>,
    n: usize,
) -> Result<CrossoverScan> {
    if n < 2 {
        return Err(Error::Domain("a scan needs at least two samples".into()));
    }
    Primitive::shared(rho, 0.0)?;
    let samples: Vec<CrossoverSample> = (0..n)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            let kappa = start[0] + t * (end[0] - start[0]);
            let lambda = start[1] + t * (end[1] - start[1]);
            let params = CanonicalParams::new(alpha, beta, kappa, lambda, rho);
            let mut s = CrossoverSample { t, kappa, lambda, pam: None, signature: None, error: None };
            match signature_at(&params) {
                Ok((pam, sig)) => {
                    s.pam = Some(pam);
                    s.signature = Some(sig.to_string());
                }
                Err(e) => s.error = Some(e.to_string()),
            }
            s
        })
        .collect();
    let windows = group_windows(&samples);
    Ok(CrossoverScan { alpha, beta, start, end, samples, windows })
}

fn group_windows(samples: &[CrossoverSample]) -> Vec<SignatureWindow> {
    let mut out: Vec<SignatureWindow> = Vec::new();
    for s in samples {
        let (Some(sig), Some(pam)) = (&s.signature, &s.pam) else {
            continue;
        };
        match out.last_mut() {
            Some(w) if &w.signature == sig => {
                w.t_end = s.t;
                w.kappa[1] = s.kappa;
                w.lambda[1] = s.lambda;
                w.mu[1] = pam.a12;
                w.samples += 1;
            }
            _ => out.push(SignatureWindow {
                signature: sig.clone(),
                t_start: s.t,
                t_end: s.t,
                kappa: [s.kappa; 2],
                lambda: [s.lambda; 2],
                mu: [pam.a12; 2],
                samples: 1,
            }),
        }
    }
    out
}

/// Synthesizes both endpoint maps, which must share their slopes, and sweeps between them.
pub fn scan_between(start: &Pam, end: &Pam, rho: RhoSpec<f64>, n: usize) -> Result<CrossoverScan> {
    let p0 = synthesize(start, rho)?;
    let p1 = synthesize(end, rho)?;
    let gap = (p0.alpha - p1.alpha).abs().max((p0.beta - p1.beta).abs());
    if gap > SHARED_SLOPE_TOL {
        return Err(Error::Domain(format!(
            "endpoint maps need equal slopes so that (alpha, beta) is shared (mismatch {gap:e})"
        )));
    }
    scan_kappa_lambda(p0.alpha, p0.beta, [p0.kappa, p0.lambda], [p1.kappa, p1.lambda], rho, n)
}
