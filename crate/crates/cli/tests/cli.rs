use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cantisim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantisim")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// A fig3 variant that finishes in well under a second.
const QUICK: &str = r#"{
  "initial_state": {"kind": "vacuum"},
  "solver": {"fock_cutoff": 6, "t_final_dimless": 0.5, "n_samples": 11, "handoff": null, "trajectories": 40}
}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn header_line(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    text.lines().find(|l| !l.starts_with('#')).unwrap().to_string() + "\n"
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

#[test]
fn preset_subcommand_prints_a_loadable_config() {
    let o = cantisim(&["preset", "fig6"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["drive"]["theta1_mhz"], 1.0);
    assert_eq!(v["drive"]["theta2_mhz"], 0.7);
    assert_eq!(code(&cantisim(&["preset", "fig5"])), 2);
}

#[test]
fn master_run_writes_golden_headers_and_validity_comments() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "quick.json", QUICK);
    let out = tmp.path().join("out");
    let o = cantisim(&["run", "--preset", "fig3", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header_line(&out.join("series.csv")), golden("series_header.csv"));
    assert_eq!(header_line(&out.join("summary.csv")), golden("summary_header.csv"));
    for f in ["series.csv", "summary.csv"] {
        let text = fs::read_to_string(out.join(f)).unwrap();
        assert!(text.lines().any(|l| l.starts_with("# validity rwa")), "{f} lacks the validity report");
    }
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    let rows: Vec<&str> = series.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.split(',').count() == 5));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["config"]["solver"]["fock_cutoff"], 6);
    assert!(m["code_version"].is_string());
    assert!(m["seed"].is_u64());
    assert!(m["validity"]["checks"].as_array().unwrap().len() >= 3);
}

#[test]
fn trajectory_run_adds_standard_error_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "quick.json", QUICK);
    let out = tmp.path().join("out");
    let o = cantisim(&["run", "--preset", "fig3", "--config", &cfg, "--solver", "trajectory", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header_line(&out.join("series.csv")), golden("series_stderr_header.csv"));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 9);
}

#[test]
fn manifest_reingests_to_identical_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "quick.json", QUICK);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let first = cantisim(&["run", "--preset", "fig3", "--config", &cfg, "--solver", "trajectory", "--seed", "5", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&first), 0);
    let manifest = a.join("manifest.json");
    let second = cantisim(&["run", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(code(&second), 0, "{}", String::from_utf8_lossy(&second.stderr));
    for f in ["series.csv", "summary.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn sweep_is_identical_under_any_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |threads: &str, dir: &str| {
        let out = tmp.path().join(dir);
        let o = Command::new(env!("CARGO_BIN_EXE_cantisim"))
            .env("RAYON_NUM_THREADS", threads)
            .args(["run", "--preset", "fig4", "--fock", "8", "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        fs::read_to_string(out.join("summary.csv")).unwrap()
    };
    let one = run("1", "one");
    assert_eq!(one, run("3", "three"));
    assert_eq!(one.lines().filter(|l| !l.starts_with('#')).count(), 9);
}

#[test]
fn empty_sweep_grid_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "empty.json", r#"{"sweep": {"values": []}}"#);
    let o = cantisim(&["run", "--preset", "fig4", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn malformed_config_is_exit_2_and_missing_file_is_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.json", "{ \"solver\": ");
    let out = tmp.path().join("o");
    assert_eq!(code(&cantisim(&["run", "--config", &bad, "--out", out.to_str().unwrap()])), 2);
    let missing = tmp.path().join("nope.json");
    assert_eq!(code(&cantisim(&["run", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()])), 4);
    assert_eq!(code(&cantisim(&["run", "--out", out.to_str().unwrap()])), 2);
}

#[test]
fn unwritable_output_is_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "quick.json", QUICK);
    let blocker = write(tmp.path(), "file", "not a directory");
    let o = cantisim(&["run", "--preset", "fig3", "--config", &cfg, "--out", &blocker]);
    assert_eq!(code(&o), 4);
}

#[test]
fn diverging_integration_is_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "huge_dt.json", r#"{"initial_state": {"kind": "fock", "n": 3},
        "solver": {"fock_cutoff": 6, "handoff": null, "dt_s": 1e-6, "t_final_dimless": 6.0}}"#);
    let o = cantisim(&["run", "--preset", "fig3", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn strict_turns_regime_failures_into_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // Γ = g: the qubit is far from adiabatically eliminable.
    let cfg = write(tmp.path(), "slow_qubit.json", r#"{"physical": {"qubit": {"relaxation_mhz": 1.0}}}"#);
    let patch = write(tmp.path(), "quick.json", QUICK);
    let base = tmp.path().join("base.json");
    let merged = cantisim(&["preset", "fig3"]);
    let mut v: serde_json::Value = serde_json::from_slice(&merged.stdout).unwrap();
    for p in [&cfg, &patch] {
        let q: serde_json::Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        cantisim_core::scenario::merge_patch(&mut v, &q);
    }
    fs::write(&base, v.to_string()).unwrap();
    let lax = tmp.path().join("lax");
    assert_eq!(code(&cantisim(&["run", "--config", base.to_str().unwrap(), "--out", lax.to_str().unwrap()])), 0);
    let strict = tmp.path().join("strict");
    let o = cantisim(&["run", "--config", base.to_str().unwrap(), "--strict", "--out", strict.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    // Outputs are still written so the failure can be inspected.
    assert!(strict.join("manifest.json").exists());
}
