use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_awcongest"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

const SMALL_PLATEAU: &str = "\
epsilons = 1e-2, 3e-3, 1e-3
gamma = 2
beta = 3
alpha = 0.25
n_cells = 64
t_end = 0.1
initial = two_plateau
rho_left = 0.6
rho_right = 0.6
u_left = 0.4
u_right = -0.4
sigma = 0.05
with_oracle = true
n_particles = 100
oracle_snapshots = 3
";

#[test]
fn run_on_the_uniform_config_has_zero_energy_drift() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(repo_config("uniform.conf"))
        .arg("--output-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&dir.path().join("summary.json"));
    assert!(summary["summary"]["energy_drift"].as_f64().unwrap().abs() < 1e-14);
    assert!(summary["config"]["params"]["epsilon"].is_number());
    let csv = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("# awcongest-diagnostics v1\ntime,energy,bd_norm,"));
    let state = fs::read_to_string(dir.path().join("terminal_state.csv")).unwrap();
    assert!(state.starts_with("# awcongest-state v1"));
}

#[test]
fn identical_runs_write_identical_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "wave.conf",
        "epsilon = 1e-2\ngamma = 2\nbeta = 3\nalpha = 0.25\nn_cells = 64\nt_end = 0.05\n\
         initial = sinusoidal\nrho_bar = 0.6\na_rho = 0.1\na_u = 0.3\nensemble_size = 3\nperturbation = 0.01\nseed = 7\n",
    );
    let mut bytes = Vec::new();
    let o = dir.path().join("out");
    for _ in 0..2 {
        let out = bin().args(["run", "--config"]).arg(&cfg).arg("--output-dir").arg(&o).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        bytes.push((fs::read(o.join("summary.json")).unwrap(), fs::read(o.join("ensemble.json")).unwrap()));
    }
    assert_eq!(bytes[0], bytes[1]);
    let ensemble: Value = serde_json::from_slice(&bytes[0].1).unwrap();
    assert_eq!(ensemble.as_array().unwrap().len(), 3);
}

#[test]
fn missing_key_exits_with_the_config_code_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.conf", "epsilon = 1e-2\ngamma = 2\nbeta = 3\nalpha = 0.25\nn_cells = 64\ninitial = sinusoidal\nrho_bar = 0.5\na_rho = 0.1\na_u = 0.1\n");
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "config");
    assert_eq!(err["key"], "t_end");
}

#[test]
fn unknown_and_malformed_keys_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("epsilon = 1e-2\nepsilom = 3\n", "epsilom"),
        ("epsilon = one\n", "epsilon"),
    ] {
        let cfg = write_config(dir.path(), "bad.conf", text);
        let out = bin().args(["oracle", "--config"]).arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(3), "{text}");
        assert_eq!(stderr_json(&out)["key"], key);
    }
}

#[test]
fn data_above_the_ceiling_margin_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "dense.conf",
        "epsilon = 1e-2\ngamma = 2\nbeta = 3\nalpha = 0.25\nn_cells = 64\nt_end = 0.1\n\
         initial = sinusoidal\nrho_bar = 0.9\na_rho = 0.08\na_u = 0.1\n",
    );
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"], "validation");
}

#[test]
fn missing_config_file_is_an_io_error() {
    let out = bin().args(["run", "--config", "/nonexistent/awcongest.conf"]).output().unwrap();
    assert_eq!(out.status.code(), Some(6));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin().args(["run", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_the_exit_codes() {
    let out = bin().arg("--help").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    for code in ["2  usage", "3  configuration", "4  validation", "5  solver", "6  i/o"] {
        assert!(text.contains(code), "{code}");
    }
}

#[test]
fn sweep_oracle_and_compare_fit_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "plateau.conf", SMALL_PLATEAU);
    let out_dir = dir.path().join("out");

    let out = bin().args(["sweep", "--config"]).arg(&cfg).arg("--output-dir").arg(&out_dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&out_dir.join("sweep_report.json"));
    assert!(report["ceiling_slope"].is_number());
    assert_eq!(report["rows"].as_array().unwrap().len(), 3);
    assert!(report["rows"][0]["oracle_distance"].is_number());
    let gp = fs::read_to_string(out_dir.join("ceiling_gap.gp")).unwrap();
    assert!(gp.contains("set logscale xy") && gp.contains("sweep.csv"));
    for tag in ["1e-2", "3e-3", "1e-3"] {
        assert!(out_dir.join(format!("diagnostics_eps_{tag}.csv")).exists(), "{tag}");
    }

    let out = bin().args(["oracle", "--config"]).arg(&cfg).arg("--output-dir").arg(&out_dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let blocks = read_json(&out_dir.join("blocks.json"));
    let snaps = blocks["snapshots"].as_array().unwrap();
    assert_eq!(snaps.len(), 3);
    assert_eq!(snaps[2]["time"].as_f64().unwrap(), 0.1);

    // `run` takes one epsilon; reuse the sweep data at the largest
    let single = write_config(dir.path(), "single.conf", &SMALL_PLATEAU.replace("epsilons = 1e-2, 3e-3, 1e-3", "epsilon = 1e-2"));
    let run_dir = dir.path().join("run");
    let out = bin().args(["run", "--config"]).arg(&single).arg("--output-dir").arg(&run_dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let result = dir.path().join("compare.json");
    let out = bin()
        .arg("compare")
        .arg("--state")
        .arg(run_dir.join("terminal_state.csv"))
        .arg("--blocks")
        .arg(out_dir.join("blocks.json"))
        .arg("--output")
        .arg(&result)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cmp = read_json(&result);
    let d = cmp["cdf_distance"].as_f64().unwrap();
    let from_sweep = report["rows"][0]["oracle_distance"].as_f64().unwrap();
    assert!((d - from_sweep).abs() < 1e-12, "{d} vs {from_sweep}");
}

#[test]
fn compare_rejects_mismatched_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.csv");
    let mut text = String::from("# awcongest-state v1 length=2 time=0\nx,rho,u\n");
    for j in 0..8 {
        text.push_str(&format!("{},0.5,0\n", (j as f64 + 0.5) * 0.25));
    }
    fs::write(&state, text).unwrap();
    let blocks = dir.path().join("b.json");
    fs::write(&blocks, r#"{"time":0,"length":1,"clusters":[{"mass":0.5,"center":0.5,"velocity":0}]}"#).unwrap();
    let out = bin().arg("compare").arg("--state").arg(&state).arg("--blocks").arg(&blocks).output().unwrap();
    assert!(!out.status.success());
    assert_eq!(stderr_json(&out)["error"], "validation");
}
