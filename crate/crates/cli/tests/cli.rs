use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cqnls(args: &[&str], config: Option<&str>, dir: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cqnls"));
    cmd.args(args).env_remove("CQNLS_THREADS");
    if let Some(text) = config {
        let path = dir.join("run.ini");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn error_record(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(stderr.lines().last().unwrap()).unwrap_or_else(|_| panic!("not a record: {stderr}"))
}

#[test]
fn masscurve_default_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("mc");
    let out = cqnls(&["masscurve", "--out", run.to_str().unwrap()], Some("dim = 2\n"), tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&run.join("masses.csv"));
    assert_eq!(csv.lines().next(), Some("omega,mass,slope,verdict"));
    assert_eq!(csv.lines().count(), 25);
    let config: serde_json::Value = serde_json::from_str(&read(&run.join("config.json"))).unwrap();
    assert_eq!(config["sweep"]["points"], 24);
    assert_eq!(config["shooting"]["n"], 4001);
    let report: serde_json::Value = serde_json::from_str(&read(&run.join("report.json"))).unwrap();
    assert_eq!(report["flags"]["asymptotic_slope"], true);
    assert!(run.join("mass_curve.svg").exists());
}

#[test]
fn rerun_reproduces_csv_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "dim = 3\n[sweep]\npoints = 5\nomega_min = 0.02\nomega_max = 0.04\n";
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let run = tmp.path().join(name);
        let out = cqnls(&["rho0", "--out", run.to_str().unwrap()], Some(text), tmp.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let mut config: serde_json::Value = serde_json::from_str(&read(&run.join("config.json"))).unwrap();
        config["output_dir"] = serde_json::Value::Null;
        outputs.push((read(&run.join("masses.csv")), config));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn boundary_minimum_fails_a_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("r");
    let text = "[sweep]\npoints = 3\nomega_min = 0.005\nomega_max = 0.007\n";
    let out = cqnls(&["rho0", "--out", run.to_str().unwrap()], Some(text), tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&read(&run.join("report.json"))).unwrap();
    assert_eq!(report["flags"]["interior_minimum"], false);
}

#[test]
fn invalid_omega_is_a_structured_error() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("g");
    let out = cqnls(&["groundstate", "--out", run.to_str().unwrap()], Some("[soliton]\nomega = 0.2\n"), tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let rec = error_record(&out);
    assert_eq!(rec["error"], "ConfigValidationError");
    assert!(rec["message"].as_str().unwrap().contains("0<ω<3/16"));
    assert!(!run.exists());

    let out = cqnls(&["groundstate", "--out", run.to_str().unwrap()], Some("[soliton]\nomega=0.1\nomega=0.1\n"), tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let rec = error_record(&out);
    assert_eq!(rec["error"], "ConfigParseError");
    assert_eq!(rec["line"], 3);
    assert_eq!(rec["key"], "omega");
}

#[test]
fn missing_output_parent_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("no/such/parent");
    let out = cqnls(&["groundstate", "--out", run.to_str().unwrap()], None, tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_record(&out)["error"], "IoError");
}

#[test]
fn usage_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cqnls(&["frobnicate"], None, tmp.path()).status.code(), Some(1));
    assert_eq!(cqnls(&["groundstate", "--threads", "many"], None, tmp.path()).status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_cqnls")).arg("groundstate").env("CQNLS_THREADS", "x").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(cqnls(&["--help"], None, tmp.path()).status.code(), Some(0));
}

#[test]
fn groundstate_writes_profile_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("g");
    let out = Command::new(env!("CARGO_BIN_EXE_cqnls"))
        .args(["groundstate", "--out", run.to_str().unwrap(), "--seed", "11"])
        .env("CQNLS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(&run.join("profile.csv")).lines().next(), Some("r,phi"));
    let meta: serde_json::Value = serde_json::from_str(&read(&run.join("profile.json"))).unwrap();
    assert_eq!(meta["omega"], 0.12);
    let report: serde_json::Value = serde_json::from_str(&read(&run.join("report.json"))).unwrap();
    assert_eq!(report["flags"]["pohozaev"], true);
    assert_eq!(report["labels"]["seed"], "11");
    let config: serde_json::Value = serde_json::from_str(&read(&run.join("config.json"))).unwrap();
    assert_eq!(config["seed"], 11);
    assert!(!run.join("series.csv").exists());
}

#[test]
fn stability_three_dimensional_reports_growth() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("s");
    // Coarse grid and short horizon: this checks the pipeline, not the physics.
    let text = "dim = 3\n[soliton]\nomega = 0.01\n[grid]\nextent = 96\npoints = 32\n[evolve]\ndt = 0.1\nt_end = 2\nstride = 5\n";
    let out = cqnls(&["stability", "--out", run.to_str().unwrap(), "--seed", "3"], Some(text), tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(&run.join("report.json"))).unwrap();
    assert!(report["fitted"]["growth_factor"].as_f64().unwrap() > 0.0);
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
    let series = read(&run.join("series.csv"));
    assert_eq!(series.lines().next(), Some(cqnls::diagnostics::SERIES_HEADER));
    assert_eq!(series.lines().count(), 1 + 5);
    assert!(run.join("mod_dist.svg").exists());
}

#[test]
fn evolve_writes_series_and_final_field() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("e");
    let text = "dim = 1\n[evolve]\nt_end = 1\nstride = 10\ncheckpoint_interval = 3600\n";
    let out = cqnls(&["evolve", "--out", run.to_str().unwrap()], Some(text), tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let f = cqnls::fields::io::read_field(&run.join("final.bin")).unwrap();
    assert!((f.time() - 1.0).abs() < 1e-12);
    assert_eq!(read(&run.join("series.csv")).lines().count(), 1 + 11);
    // The first observation always checkpoints.
    assert!(run.join("checkpoints/ckpt_0000.bin").exists());
}

#[test]
fn spectrum_reports_verdict_and_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("sp");
    let out = cqnls(&["spectrum", "--out", run.to_str().unwrap()], Some("dim = 3\n[soliton]\nomega = 0.01\n"), tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(&run.join("spectrum.csv")).lines().next(), Some("kind,ell,index,eigenvalue"));
    assert_eq!(read(&run.join("delta.csv")).lines().next(), Some("convention,r,delta"));
    let report: serde_json::Value = serde_json::from_str(&read(&run.join("report.json"))).unwrap();
    assert_eq!(report["labels"]["verdict"], "unstable");
    assert_eq!(report["flags"]["assumption"], true);
}

#[test]
fn scatter_soliton_does_not_decay() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("sc");
    let text = "[initial]\nkind = soliton\nomega = 0.05\n[grid]\nextent = 100\npoints = 192\n[evolve]\ndt = 0.02\nt_end = 8\nstride = 10\n";
    let out = cqnls(&["scatter", "--out", run.to_str().unwrap()], Some(text), tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&read(&run.join("report.json"))).unwrap();
    assert!(report["fitted"]["alpha"].as_f64().unwrap().abs() < 0.2);
    assert!(run.join("l6_decay.svg").exists());
}
