use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anyon-entropy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sweep_ground_state_starts_at_zero_entropy() {
    let out = run(&["sweep", "--state", "0,0", "--eta", "0:4:41"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with(
        "eta,entropy,trace_error,lambda0,lambda1,lambda2,lambda3,lambda4,lambda5,lambda6,lambda7,M,K,L,status\n"
    ));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 41);
    assert_eq!(rows[0][0], "0");
    assert!(rows[0][1].parse::<f64>().unwrap().abs() < 1e-8);
    assert!(rows.iter().all(|r| r.len() == 15 && r[14] == "ok"));
    // η column is in grid order
    let etas: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(etas.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn sweep_excited_state_is_one_bit_at_zero() {
    let out = run(&["sweep", "--state", "1,0", "--eta", "0:0:1"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1].parse::<f64>().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(&rows[0][11..14], ["32", "40", "40"]);
}

#[test]
fn sweep_fermionic_trend_approaches_one() {
    let out = run(&["sweep", "--state", "1,0", "--eta", "25,50,100"]);
    assert!(out.status.success());
    let gaps: Vec<f64> = csv_rows(&stdout(&out))
        .iter()
        .map(|r| (r[1].parse::<f64>().unwrap() - 1.0).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{gaps:?}");
    assert!(gaps[2] < 0.02);
}

#[test]
fn natural_log_base() {
    let out = run(&["sweep", "--state", "1,0", "--eta", "0", "--log-base", "e"]);
    let rows = csv_rows(&stdout(&out));
    assert!((rows[0][1].parse::<f64>().unwrap() - std::f64::consts::LN_2).abs() < 1e-11);
}

#[test]
fn matrix_dump_of_excited_state_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let out = run(&[
        "matrix",
        "--state",
        "1,0",
        "--eta",
        "0",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = read_json(&path);
    let m = v["M"].as_u64().unwrap() as usize;
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), m * m);
    assert_eq!(entries[0].as_f64(), Some(0.5));
    assert_eq!(entries[m + 1].as_f64(), Some(0.5));
    assert_eq!(v["state"], serde_json::json!([1, 0]));
    assert_eq!(v["method"], "generic");
    assert_eq!(v["log_base"], "2");
    assert!((v["entropy"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v.get("generated").is_none());
}

#[test]
fn matrix_dump_round_trips_through_sweep_loader() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("rho.json");
    let reloaded = dir.path().join("again.json");
    assert!(
        run(&["matrix", "--state", "0,0", "--eta", "1", "-o", dump.to_str().unwrap()])
            .status
            .success()
    );
    let out = run(&[
        "sweep",
        "--from-matrix",
        dump.to_str().unwrap(),
        "--format",
        "json",
        "-o",
        reloaded.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = read_json(&dump);
    let b = read_json(&reloaded);
    assert_eq!(
        a["entropy"].as_f64().unwrap().to_bits(),
        b["entropy"].as_f64().unwrap().to_bits()
    );
    assert_eq!(a["eigenvalues"], b["eigenvalues"]);
    assert_eq!(a["trace_error"], b["trace_error"]);

    // entries survive parse/serialize unchanged
    let parsed: anyon_entropy::rdm::MatrixDump = serde_json::from_value(a.clone()).unwrap();
    let rho = anyon_entropy::ReducedDensityMatrix::from_dump(&parsed).unwrap();
    let again = serde_json::to_value(rho.to_dump()).unwrap();
    assert_eq!(again["entries"], a["entries"]);
}

#[test]
fn malformed_flags_exit_two() {
    for args in [
        &["sweep", "--bogus"][..],
        &["sweep", "--state", "1"],
        &["sweep", "--eta", "2,1"],
        &["sweep", "--eta", "0:1"],
        &["sweep", "--log-base", "10"],
        &["sweep", "--basis-dim", "1"],
        &["matrix", "--eta", "-1"],
        &["converge", "--basis-dim", "16,24", "--trace-cap", "40"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = bin()
        .args(["sweep", "--eta", "0"])
        .env("ANYON_ENTROPY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_samples_are_flagged_in_row() {
    // the closed form exists only for (0,0) and (1,0)
    let out = run(&["sweep", "--state", "2,0", "--eta", "0.5,1", "--method", "closed"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[1] == "nan"));
    assert!(text.lines().skip(1).all(|l| l.contains("failed")));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|k| dir.path().join(format!("run{k}.csv"))).collect();
    for (k, p) in paths.iter().enumerate() {
        let threads = if k == 0 { "1" } else { "3" };
        let out = bin()
            .args(["sweep", "--state", "1,0", "--eta", "0:3:7", "-o", p.to_str().unwrap()])
            .env("ANYON_ENTROPY_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn stamp_only_when_requested() {
    let plain = stdout(&run(&["sweep", "--eta", "1"]));
    assert!(!plain.contains("generated"));
    let stamped = stdout(&run(&["sweep", "--eta", "1", "--stamp"]));
    let first = stamped.lines().next().unwrap();
    assert!(first.starts_with("# generated 20"), "{first}");
    assert_eq!(
        stamped.lines().skip(1).collect::<Vec<_>>(),
        plain.lines().collect::<Vec<_>>()
    );
}

#[test]
fn converge_reports_deltas() {
    let out = run(&["converge", "--state", "0,0", "--eta", "4", "--basis-dim", "16,24,32"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("M,K,L,entropy,trace_error,delta"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][5], "");
    let last: f64 = rows[2][5].parse().unwrap();
    assert!(last.abs() < 1e-4);
}

#[test]
fn quick_validation_passes() {
    let out = run(&["validate", "--quick"]);
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.contains(" failed") && text.trim_end().ends_with("0 failed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn perturbed_script_d_fails_validation() {
    let out = run(&["validate", "--quick", "--perturb-script-d", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&str> = report
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"four-point vs oracle"), "{failed:?}");
}
