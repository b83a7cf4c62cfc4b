use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use pamflow_core::assoc::associated_pam;
use pamflow_core::crossover::scan_between;
use pamflow_core::pam::{iterate_orbit, OrbitOptions};
use pamflow_core::synthesis::synthesize_report;
use pamflow_core::tables::{pam_signature, verify_tables, CROSSOVER_CASES};
use pamflow_core::{CanonicalField, Pam, Params, RhoSpec, Signature, TransformedPam};
use pamflow_sim::classify::{classify_series, ClassifyOptions};
use pamflow_sim::export::{series_plots, svg_plot, write_crossings_csv, write_series_csv, Curve};
use pamflow_sim::{hybrid_simulate, integrate_full, visual_rescale, SimConfig};

use crate::args::*;
use crate::config::Config;
use crate::error::{CliError, CliResult};

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn out_dir(dir: &Option<std::path::PathBuf>) -> CliResult<Option<&Path>> {
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
    }
    Ok(dir.as_deref())
}

pub fn pam(cmd: &PamCommand, cfg: &Config) -> CliResult<()> {
    match cmd {
        PamCommand::Iterate(a) => iterate(a, cfg),
        PamCommand::Signature(a) => {
            let sig = pam_signature(&a.pam.resolve(cfg)?)?;
            println!("{sig}");
            Ok(())
        }
        PamCommand::Bounds(a) => bounds(a),
        PamCommand::Transform(a) => transform(a, cfg),
    }
}

fn iterate(a: &IterateArgs, cfg: &Config) -> CliResult<()> {
    let pam = a.pam.resolve(cfg)?;
    let opts = OrbitOptions { max_iters: a.max_iters, tol: a.tol, ..Default::default() };
    let orbit = iterate_orbit(&pam, a.z0, &opts)?;
    let signature = orbit
        .converged
        .then(|| pamflow_core::pam::detect_signature(&orbit))
        .transpose()?;
    if let Some(dir) = out_dir(&a.out_dir)? {
        let mut csv = String::from("n,Z\n");
        for (n, z) in orbit.iterates.iter().enumerate() {
            csv.push_str(&format!("{n},{z}\n"));
        }
        fs::write(dir.join("orbit.csv"), csv)?;
        fs::write(dir.join("cobweb.svg"), cobweb(&pam, &orbit.iterates))?;
    }
    print_json(&json!({
        "z0": a.z0,
        "iterations": orbit.iterates.len() - 1,
        "converged": orbit.converged,
        "transient": orbit.transient_length,
        "period": orbit.period,
        "cycle": orbit.cycle(),
        "signature": signature.map(|s| s.to_string()),
    }))?;
    if orbit.converged {
        Ok(())
    } else {
        Err(CliError::Inconclusive("no periodic orbit within the iteration budget".into()))
    }
}

fn cobweb(pam: &Pam, zs: &[f64]) -> String {
    let shown = &zs[..zs.len().min(400)];
    let (lo, hi) = shown.iter().fold((-1.0f64, 1.0f64), |(l, h), &z| (l.min(z), h.max(z)));
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let left = vec![(lo, pam.a11 * lo + pam.a12), (0.0, pam.a12)];
    let right = vec![(0.0, pam.a22), (hi, pam.a21 * hi + pam.a22)];
    let mut web = Vec::with_capacity(2 * shown.len());
    for w in shown.windows(2) {
        web.push((w[0], w[0]));
        web.push((w[0], w[1]));
    }
    svg_plot(
        "cobweb",
        "Z_n",
        "Z_n+1",
        &[
            Curve::new("Z < 0 branch", left),
            Curve::new("Z > 0 branch", right),
            Curve::new("diagonal", vec![(lo, lo), (hi, hi)]),
            Curve::new("orbit", web),
        ],
    )
}

fn bounds(a: &BoundsArgs) -> CliResult<()> {
    let tp = TransformedPam { a: a.a, b: a.b, mu: a.mu.unwrap_or(0.0), l: a.l };
    tp.check_bounds_domain()?;
    if a.lao.is_none() && a.sao.is_none() {
        return Err(CliError::Usage("give --L and/or --s".into()));
    }
    let mut out = serde_json::Map::new();
    out.insert("a".into(), json!(a.a));
    out.insert("b".into(), json!(a.b));
    out.insert("l".into(), json!(a.l));
    let window_json = |w: &pamflow_core::pam::MuInterval<f64>| {
        json!({
            "lower": w.lower,
            "upper": w.upper,
            "lower_closed": w.lower_closed,
            "upper_closed": w.upper_closed,
            "text": format!(
                "{}{:.4}, {:.4}{}",
                if w.lower_closed { "[" } else { "(" },
                w.lower,
                w.upper,
                if w.upper_closed { "]" } else { ")" }
            ),
            "contains_mu": a.mu.map(|m| w.contains(m)),
        })
    };
    if let Some(lao) = a.lao {
        if lao == 0 {
            return Err(CliError::Usage("--L must be positive".into()));
        }
        let b = tp.lao_bounds(lao)?;
        out.insert(
            "lao".into(),
            json!({"L": lao, "at_least": b.at_least, "at_most": b.at_most, "window": window_json(&tp.lao_window(lao)?)}),
        );
    }
    if let Some(sao) = a.sao {
        if sao == 0 {
            return Err(CliError::Usage("--s must be positive".into()));
        }
        let b = tp.sao_bounds(sao)?;
        out.insert(
            "sao".into(),
            json!({"s": sao, "at_least": b.at_least, "at_most": b.at_most, "window": window_json(&tp.sao_window(sao)?)}),
        );
    }
    print_json(&out)
}

fn transform(a: &TransformArgs, cfg: &Config) -> CliResult<()> {
    if a.inverse {
        let need = |v: Option<f64>, n: &str| v.ok_or_else(|| CliError::Usage(format!("--inverse needs --{n}")));
        let tp = TransformedPam { a: need(a.a, "a")?, b: need(a.b, "b")?, mu: need(a.mu, "mu")?, l: need(a.l, "l")? };
        let pam = tp.to_pam();
        pam.validate()?;
        print_json(&pam)
    } else {
        let pam = a.pam.resolve(cfg)?;
        let tp = pam.transform();
        print_json(&json!({"a": tp.a, "b": tp.b, "mu": tp.mu, "l": tp.l, "mu_admissible": tp.mu_admissible()}))
    }
}

pub fn synth(a: &SynthArgs, cfg: &Config) -> CliResult<()> {
    let target = a.pam.resolve(cfg)?;
    let rho = a.rho.resolve(cfg.canonical.map(|c| c.rho).unwrap_or_default())?;
    let report = synthesize_report(&target, rho)?;
    if a.verify {
        print_json(&report)
    } else {
        print_json(&report.params)
    }
}

fn sim_config(a: &SimulateArgs, cfg: &Config) -> SimConfig {
    let mut sc = cfg.sim.unwrap_or_default();
    if let Some(v) = a.eps {
        sc.eps = v;
    }
    if let Some(v) = a.delta {
        sc.delta = v;
    }
    if let Some(v) = a.max_slow_time {
        sc.max_slow_time = v;
    }
    if a.max_crossings.is_some() {
        sc.max_crossings = a.max_crossings;
    }
    if sc.max_crossings.is_none() {
        sc.max_crossings = Some(30);
    }
    sc
}

/// Parameters from flags, a map to synthesize, or the config (in that order).
fn simulate_params(a: &SimulateArgs, cfg: &Config) -> CliResult<Params> {
    if a.params.any() || (!a.pam.any() && cfg.canonical.is_some()) {
        return a.params.resolve(cfg);
    }
    if a.pam.any() || cfg.pam.is_some() {
        let target = a.pam.resolve(cfg)?;
        let rho = a.params.rho.resolve(cfg.canonical.map(|c| c.rho).unwrap_or_default())?;
        return Ok(pamflow_core::synthesis::synthesize(&target, rho)?);
    }
    Err(CliError::Usage("give --alpha/--beta/--kappa/--lambda or a map via --a11.. or --config".into()))
}

fn pam_prediction(params: &Params) -> CliResult<(Pam, Signature)> {
    let field = CanonicalField::new(*params)?;
    let pam = associated_pam(params, field.geometry())?;
    Ok((pam, pam_signature(&pam)?))
}

pub fn simulate(a: &SimulateArgs, cfg: &Config) -> CliResult<()> {
    let params = simulate_params(a, cfg)?;
    let sc = sim_config(a, cfg);
    let dir = out_dir(&a.out_dir)?;
    let mut report = serde_json::Map::new();
    report.insert("params".into(), serde_json::to_value(params)?);
    let mut canard = false;
    let signature = match a.mode {
        SimMode::Hybrid => {
            let delta = a.delta.or(cfg.sim.map(|s| s.delta)).unwrap_or(SimConfig::default().delta);
            let run = hybrid_simulate(&params, delta, a.z_start, a.n_returns)?;
            if let Some(dir) = dir {
                let mut csv = String::from("n,Z,lao\n");
                for (n, z) in run.zs.iter().enumerate() {
                    let lao = run.branches.get(n).map_or(String::new(), |b| b.to_string());
                    csv.push_str(&format!("{n},{z},{lao}\n"));
                }
                fs::write(dir.join("returns.csv"), csv)?;
            }
            report.insert("mode".into(), json!("hybrid"));
            report.insert("delta".into(), json!(delta));
            report.insert("returns".into(), json!(run.zs));
            report.insert("period".into(), json!(run.period));
            run.signature
        }
        SimMode::Full => {
            let run = integrate_full(&params, &sc)?;
            let field = CanonicalField::new(params)?;
            let opts = ClassifyOptions { z0: params.z0, delta: sc.delta, eps: sc.eps, section: sc.section, ..Default::default() };
            let class = classify_series(&run.series, field.geometry(), &opts);
            if let Some(dir) = dir {
                write_series_csv(&run.series, fs::File::create(dir.join("series.csv"))?)?;
                write_crossings_csv(&run.crossings, params.z0, sc.delta, fs::File::create(dir.join("crossings.csv"))?)?;
                for (name, svg) in series_plots(&run.series) {
                    fs::write(dir.join(name), svg)?;
                }
                let scaled = visual_rescale(&run.series, params.z0, sc.delta);
                let [(_, svg), _] = series_plots(&scaled);
                fs::write(dir.join("timeseries_rescaled.svg"), svg)?;
            }
            report.insert("mode".into(), json!("full"));
            report.insert("sim".into(), serde_json::to_value(sc)?);
            report.insert("accepted_steps".into(), json!(run.accepted_steps));
            report.insert("rejected_steps".into(), json!(run.rejected_steps));
            report.insert(
                "returns".into(),
                json!(run.crossings.iter().map(|c| (c.z - params.z0) / sc.delta).collect::<Vec<_>>()),
            );
            match class {
                Ok(c) => {
                    canard = c.canard_hole;
                    report.insert("period".into(), json!(c.period));
                    report.insert("canard_radius".into(), json!(c.canard_radius));
                    report.insert("canard_hole".into(), json!(c.canard_hole));
                    Some(c.signature)
                }
                Err(e) => {
                    report.insert("classification_error".into(), json!(e.to_string()));
                    None
                }
            }
        }
    };
    report.insert("signature".into(), json!(signature.as_ref().map(|s| s.to_string())));
    if a.compare_pam {
        let (pam, predicted) = pam_prediction(&params)?;
        report.insert("pam".into(), serde_json::to_value(pam)?);
        report.insert("pam_signature".into(), json!(predicted.to_string()));
        report.insert("match".into(), json!(signature.as_ref() == Some(&predicted)));
    }
    print_json(&report)?;
    if canard {
        return Err(CliError::Inconclusive("a return fell inside the canard hole around the jump".into()));
    }
    if signature.is_none() {
        return Err(CliError::Inconclusive("no periodic regime detected".into()));
    }
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> CliResult<()> {
    let rep = verify_tables(a.param_tol, a.bounds_tol);
    println!("synthesis table (tolerance {:e})", rep.param_tol);
    for r in &rep.synthesis {
        let got = r.computed.map_or("-".to_string(), |c| format!("{:.4} {:.4} {:.4} {:.4}", c[0], c[1], c[2], c[3]));
        println!(
            "  {:<5} params {}  signature {}  computed {}  max err {}",
            r.signature,
            if r.params_ok { "ok  " } else { "FAIL" },
            if r.signature_ok { "ok  " } else { "FAIL" },
            got,
            r.max_abs_error.map_or("-".into(), |e| format!("{e:.2e}")),
        );
    }
    println!("bounds table (tolerance {:e})", rep.bounds_tol);
    for r in &rep.bounds {
        let got = r.computed.map_or("-".to_string(), |c| format!("{:.5} {:.5}", c[0], c[1]));
        println!(
            "  {:<5} interval {}  actual mu {}  computed {}  printed {:.4} {:.4}",
            r.signature,
            if r.interval_ok { "ok  " } else { "FAIL" },
            if r.actual_inside { "ok  " } else { "FAIL" },
            got,
            r.printed[0],
            r.printed[1],
        );
    }
    println!(
        "params {}/{}  signatures {}/{}  intervals {}/{}  memberships {}/{}",
        rep.params_passed,
        rep.synthesis.len(),
        rep.signatures_passed,
        rep.synthesis.len(),
        rep.intervals_passed,
        rep.bounds.len(),
        rep.memberships_passed,
        rep.bounds.len()
    );
    if let Some(path) = &a.json {
        fs::write(path, serde_json::to_string_pretty(&rep)?)?;
    }
    Ok(())
}

fn pam_from_vec(v: &[f64]) -> CliResult<Pam> {
    match v {
        [a11, a12, a21, a22] => Ok(Pam::new(*a11, *a12, *a21, *a22)?),
        _ => Err(CliError::Usage("a map needs four comma-separated coefficients".into())),
    }
}

pub fn crossover(a: &CrossoverArgs) -> CliResult<()> {
    let (start, end, expected) = match (&a.case, &a.start, &a.end) {
        (Some(name), None, None) => {
            let sig: Signature = name.parse()?;
            let case = CROSSOVER_CASES
                .iter()
                .find(|c| c.signature.parse::<Signature>().is_ok_and(|s| s == sig))
                .ok_or_else(|| CliError::Usage(format!("no built-in crossover case {name:?}")))?;
            (pam_from_vec(&case.start)?, pam_from_vec(&case.end)?, Some(sig))
        }
        (None, Some(s), Some(e)) => (pam_from_vec(s)?, pam_from_vec(e)?, None),
        _ => return Err(CliError::Usage("give either --case or both --start and --end".into())),
    };
    if a.n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    let rho = a.rho.resolve(RhoSpec::FixedRational)?;
    let scan = scan_between(&start, &end, rho, a.n)?;
    if let Some(dir) = out_dir(&a.out_dir)? {
        fs::write(dir.join("crossover.json"), serde_json::to_string_pretty(&scan)?)?;
        let periods: Vec<(f64, f64)> = scan
            .samples
            .iter()
            .filter_map(|s| {
                let sig: Signature = s.signature.as_ref()?.parse().ok()?;
                Some((s.t, sig.period() as f64))
            })
            .collect();
        fs::write(dir.join("crossover.svg"), svg_plot("signature period along the sweep", "t", "period", &[Curve::new("period", periods)]))?;
    }
    let windows: Vec<_> = scan
        .windows
        .iter()
        .map(|w| {
            json!({
                "signature": w.signature,
                "t": [w.t_start, w.t_end],
                "kappa": w.kappa,
                "lambda": w.lambda,
                "mu": w.mu,
                "samples": w.samples,
            })
        })
        .collect();
    let found = expected.as_ref().map(|s| !scan.windows_for(s).is_empty());
    print_json(&json!({
        "alpha": scan.alpha,
        "beta": scan.beta,
        "start": scan.start,
        "end": scan.end,
        "windows": windows,
        "expected": expected.map(|s| s.to_string()),
        "expected_found": found,
    }))
}
