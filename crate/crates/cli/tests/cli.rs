use std::process::{Command, Output};

use serde_json::Value;

fn pamflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pamflow")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const ROW_1_3: [&str; 8] = ["--a11", "0.3", "--a12", "7", "--a21", "0.9", "--a22", "-2"];

#[test]
fn signature_of_table_row() {
    let mut args = vec!["pam", "signature"];
    args.extend(ROW_1_3);
    let out = pamflow(&args);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1^3");
}

#[test]
fn bounds_json() {
    let out = pamflow(&["pam", "bounds", "--a", "0.9", "--b", "0.8", "--l", "-7.2", "--L", "2", "--mu", "2.3"]);
    assert!(out.status.success());
    let v = json(&out);
    let w = &v["lao"]["window"];
    assert!((w["lower"].as_f64().unwrap() - 2.1520).abs() < 1e-4);
    assert!((w["upper"].as_f64().unwrap() - 2.4732).abs() < 1e-4);
    assert_eq!(w["contains_mu"], Value::Bool(true));
}

#[test]
fn iterate_fixed_point_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = pamflow(&["pam", "iterate", "--a11", "0.5", "--a12", "-1", "--a21", "0.9", "--a22", "-2", "--out-dir", d]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["period"], 1);
    assert_eq!(v["signature"], "1^0");
    let csv = std::fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    assert!(csv.starts_with("n,Z\n0,-0.5\n"));
    let svg = std::fs::read_to_string(dir.path().join("cobweb.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn transform_and_inverse() {
    let mut args = vec!["pam", "transform"];
    args.extend(ROW_1_3);
    let v = json(&pamflow(&args));
    assert_eq!(v["mu"], 7.0);
    assert_eq!(v["l"], -9.0);
    let v = json(&pamflow(&["pam", "transform", "--inverse", "--a", "0.3", "--b", "0.9", "--mu", "7", "--l", "-9"]));
    assert_eq!(v["a22"], -2.0);
}

#[test]
fn synth_matches_table_row() {
    let mut args = vec!["synth"];
    args.extend(ROW_1_3);
    let v = json(&pamflow(&args));
    let printed = [0.8743, 0.0240, 30.1744, -90.4070];
    for (k, p) in ["alpha", "beta", "kappa", "lambda"].iter().zip(printed) {
        assert!((v[k].as_f64().unwrap() - p).abs() < 1e-3, "{k}");
    }
    assert_eq!(v["rho"], "fixed_rational");
}

#[test]
fn synth_quadratic_verify() {
    let mut args = vec!["synth", "--rho", "quadratic", "--p", "1", "--q", "1", "--verify"];
    args.extend(ROW_1_3);
    let out = pamflow(&args);
    assert!(out.status.success());
    assert!(json(&out)["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn domain_and_usage_exit_codes() {
    let out = pamflow(&["synth", "--a11", "0", "--a12", "1", "--a21", "0.9", "--a22", "-2"]);
    assert_eq!(out.status.code(), Some(3));
    let out = pamflow(&["pam", "iterate", "--a11", "0.5", "--a12", "1", "--a21", "0.9", "--a22", "-2", "--z0", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(pamflow(&["pam", "signature", "--a11", "0.5"]).status.code(), Some(2));
    assert_eq!(pamflow(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn hybrid_zero_delta_lists_map_iterates() {
    let out = pamflow(&[
        "simulate", "--mode", "hybrid", "--delta", "0", "--n-returns", "10", "--compare-pam", "--a11", "0.3", "--a12", "1", "--a21",
        "0.9", "--a22", "-2",
    ]);
    let v = json(&out);
    let zs: Vec<f64> = v["returns"].as_array().unwrap().iter().map(|z| z.as_f64().unwrap()).collect();
    let mut z = -0.5;
    for got in &zs[1..] {
        z = if z < 0.0 { 0.3 * z + 1.0 } else { 0.9 * z - 2.0 };
        assert!((got - z).abs() < 1e-7, "{got} vs {z}");
    }
}

#[test]
fn full_simulation_with_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"canonical": {"alpha": 0.8743, "beta": 0.0240, "kappa": 27.2674, "lambda": -64.5764},
            "sim": {"eps": 1e-7, "delta": 5e-3, "max_crossings": 25}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = pamflow(&[
        "--config",
        cfg.to_str().unwrap(),
        "simulate",
        "--compare-pam",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["signature"], "1^1");
    assert_eq!(v["pam_signature"], "1^1");
    assert_eq!(v["match"], true);
    for f in ["series.csv", "crossings.csv", "timeseries.svg", "projection.svg", "timeseries_rescaled.svg"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let series = std::fs::read_to_string(out_dir.join("series.csv")).unwrap();
    assert!(series.starts_with("t,x,y,z\n"));
}

#[test]
fn canard_hole_is_inconclusive() {
    let out = pamflow(&[
        "simulate", "--alpha", "0.8743", "--beta", "0.0240", "--kappa", "30.1744", "--lambda", "-90.4070", "--max-crossings", "80",
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["canard_hole"], true);
}

#[test]
fn verify_tables_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tables.json");
    let out = pamflow(&["verify-tables", "--json", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("signatures 16/16"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["synthesis"].as_array().unwrap().len(), 16);
    assert_eq!(v["bounds"].as_array().unwrap().len(), 11);
    let tight = pamflow(&["verify-tables", "--param-tol", "1e-6", "--bounds-tol", "1e-6"]);
    assert!(tight.status.success());
}

#[test]
fn crossover_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = pamflow(&["crossover", "--case", "1^4 1^5", "--n", "41", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json(&out)["expected_found"], true);
    assert!(dir.path().join("crossover.svg").exists());
    let same = pamflow(&["crossover", "--start", "0.9,6,0.85,-1", "--end", "0.9,6,0.85,-1", "--n", "5"]);
    let v = json(&same);
    assert_eq!(v["windows"].as_array().unwrap().len(), 1);
}
