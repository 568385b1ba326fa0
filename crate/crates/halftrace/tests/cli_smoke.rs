//! Black-box checks of the command-line binary: exit codes, output shapes,
//! result-directory layout, and determinism across reruns.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_halftrace"))
}

fn stdout_lines(output: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&output.stdout)
        .lines()
        .map(|line| serde_json::from_str(line).expect("stdout line is not JSON"))
        .collect()
}

fn records_file(out_dir: &Path) -> std::path::PathBuf {
    let mut dirs: Vec<_> = fs::read_dir(out_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    assert_eq!(dirs.len(), 1, "expected a single digest directory in {out_dir:?}");
    dirs.pop().unwrap().join("records.jsonl")
}

fn write_model_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("model.cfg");
    fs::write(&path, "m = 1\nK = 0\nX = 10\nN = 1500\npotential = 0 inf 0 0 1\n").unwrap();
    path
}

fn write_bump_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("q.cfg");
    fs::write(&path, "piece = 0 1 1 -2 1\n").unwrap();
    path
}

#[test]
fn identities_sweep_is_deterministic_and_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("runs");
    let run = || {
        bin()
            .args(["--out", out.to_str().unwrap(), "identities", "--m-range", "1..3"])
            .output()
            .unwrap()
    };

    let first = run();
    assert!(first.status.success(), "stderr: {}", String::from_utf8_lossy(&first.stderr));
    let reports = stdout_lines(&first);
    assert_eq!(reports.len(), 28, "C(2,1)+C(4,2)+C(6,3) families");
    for report in &reports {
        let obj = report.as_object().unwrap();
        let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["K", "m", "max_abs_error", "pass", "trace_pb", "trace_pb_closed"]);
        assert_eq!(obj["pass"], Value::Bool(true));
    }

    let second = run();
    assert_eq!(first.stdout, second.stdout, "stdout must be reproducible");

    let records = records_file(&out);
    let lines = fs::read_to_string(&records).unwrap();
    assert_eq!(lines.lines().count(), 56, "two runs append to the same digest");
    let record: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(record["config_digest"].as_str().unwrap().len(), 64);
    assert!(record["timestamp"].as_str().unwrap().ends_with('Z'));
}

#[test]
fn invalid_m_range_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["--out", tmp.path().to_str().unwrap(), "identities", "--m-range", "0..2"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn green_emits_arc_and_layer_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["--out", tmp.path().to_str().unwrap(), "green", "--m", "1", "--K", "0"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let reports = stdout_lines(&output);
    assert_eq!(reports.len(), 4, "three arc levels plus the layer ladder");
    for report in &reports[..3] {
        assert!(report["lambda"].is_number());
        assert!(report["rel_error"].as_f64().unwrap() <= 1e-6);
    }
    let layer = &reports[3];
    assert!(layer["epsilon"].is_array());
    assert!(layer["computed"]["im"].is_number());
}

#[test]
fn green_without_a_boundary_choice_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["--out", tmp.path().to_str().unwrap(), "green", "--m", "1"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn trace_runs_the_full_experiment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("runs");
    let model = write_model_config(tmp.path());
    let bump = write_bump_config(tmp.path());
    let csv = tmp.path().join("partial.csv");
    let output = bin()
        .args([
            "--out",
            out.to_str().unwrap(),
            "--tol-scale",
            "1.5",
            "trace",
            "--model",
            model.to_str().unwrap(),
            "--perturbation",
            bump.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    let reports = stdout_lines(&output);
    assert_eq!(reports.len(), 2, "one report per route");
    for report in &reports {
        assert!(report["nmax"].is_u64());
        assert!(report["extrapolated"].is_number());
        assert_eq!(report["rhs"].as_f64().unwrap(), -0.25);
        assert_eq!(report["converged"], Value::Bool(true));
    }
    let nmax = reports[0]["nmax"].as_u64().unwrap() as usize;
    let csv_text = fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), nmax + 1, "header plus one row per partial sum");
    assert!(csv_text.starts_with("N,partial_sum"));
    assert!(records_file(&out).exists());
}

#[test]
fn trace_rejects_untrustable_pair_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let model = write_model_config(tmp.path());
    let bump = write_bump_config(tmp.path());
    let output = bin()
        .args([
            "--out",
            tmp.path().join("runs").to_str().unwrap(),
            "trace",
            "--model",
            model.to_str().unwrap(),
            "--perturbation",
            bump.to_str().unwrap(),
            "--nmax",
            "1000",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&output.stderr).contains("trusted pair count"));
}

#[test]
fn trace_rejects_multi_term_conditions() {
    let tmp = tempfile::tempdir().unwrap();
    let model = tmp.path().join("model.cfg");
    fs::write(&model, "m = 1\ncondition = 1 1\nX = 8\nN = 400\npotential = 0 inf 0 0 1\n")
        .unwrap();
    let bump = write_bump_config(tmp.path());
    let output = bin()
        .args([
            "--out",
            tmp.path().join("runs").to_str().unwrap(),
            "trace",
            "--model",
            model.to_str().unwrap(),
            "--perturbation",
            bump.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn out_dir_flag_overrides_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("from_env");
    let flag_dir = tmp.path().join("from_flag");

    let status = bin()
        .env("HALFTRACE_RESULTS_DIR", &env_dir)
        .args(["identities", "--m-range", "1..1"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert!(records_file(&env_dir).exists(), "env var directs output when no flag is given");

    let status = bin()
        .env("HALFTRACE_RESULTS_DIR", &env_dir)
        .args(["--out", flag_dir.to_str().unwrap(), "identities", "--m-range", "1..1"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert!(records_file(&flag_dir).exists(), "flag wins over the env var");
}

#[test]
fn report_lists_and_expands_run_records() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("runs");
    let status = bin()
        .args(["--out", out.to_str().unwrap(), "identities", "--m-range", "1..1"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());

    let index_out =
        bin().args(["--out", out.to_str().unwrap(), "report"]).output().unwrap();
    assert!(index_out.status.success());
    let index: Value = serde_json::from_slice(&index_out.stdout).unwrap();
    let entries = index.as_array().unwrap();
    assert_eq!(entries.len(), 1);
    let digest = entries[0]["digest"].as_str().unwrap().to_owned();
    assert_eq!(entries[0]["records"], Value::from(2u64));

    let detail_out = bin()
        .args(["--out", out.to_str().unwrap(), "report", "--digest", &digest])
        .output()
        .unwrap();
    assert!(detail_out.status.success());
    let detail: Value = serde_json::from_slice(&detail_out.stdout).unwrap();
    assert_eq!(detail.as_array().unwrap().len(), 2);
}
