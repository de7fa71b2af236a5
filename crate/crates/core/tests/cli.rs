use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qdverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdverify")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON object")
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn teleport_example() {
    let out = qdverify(&["criterion", "--a", "0.82", "--b", "0.82", "--B", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["results"]["verdict"], false);
    assert!((v["results"]["closed_form"]["rhs"].as_f64().unwrap() - 0.933013).abs() < 5e-7);
    assert_eq!(v["results"]["methods_agree"], true);
}

#[test]
fn report_keys_in_fixed_order() {
    let out = qdverify(&["criterion", "--a", "0.95", "--b", "0.9", "--B", "0.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let pos: Vec<usize> = ["\"tool\"", "\"version\"", "\"command\"", "\"settings\"", "\"inputs\"", "\"results\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert!(text.contains(&format!("\"version\": \"{}\"", env!("CARGO_PKG_VERSION"))));
}

#[test]
fn quantum_verdict_still_exits_zero() {
    let out = qdverify(&["criterion", "--a", "0.99", "--b", "0.99", "--gamma", "0.9", "--gamma-prime", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["verdict"], true);
}

#[test]
fn bad_inputs_exit_nonzero() {
    for args in [
        vec!["criterion", "--a", "1.2", "--b", "0.5", "--B", "0.2"],
        vec!["criterion", "--a", "0.5", "--b", "0.5", "--B", "1.5"],
        vec!["criterion", "--a", "0.5", "--b", "0.5"],
        vec!["coherent", "--alpha", "1", "--eta", "1.5", "--a", "0.9", "--b", "0.9"],
        vec!["boundary", "--B", "0.5", "--points", "1"],
        vec!["table1", "--theta-points", "3"],
        vec!["frobnicate"],
        vec!["squeezed", "/nonexistent/record.json"],
    ] {
        let out = qdverify(&args);
        let code = out.status.code();
        let expected = if args[0] == "squeezed" { 1 } else { 2 };
        assert_eq!(code, Some(expected), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn boundary_curve_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let out = qdverify(&["boundary", "--B", "0.5", "--points", "200", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,b"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().any(|&(a, b)| a == b && (a - 0.853553).abs() < 1e-6));
    assert!((report(&out)["results"]["symmetric_point"].as_f64().unwrap() - 0.8535533905932737).abs() < 1e-15);
}

#[test]
fn table1_matches_golden() {
    let out = qdverify(&["table1"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = fs::read(golden("table1.json")).unwrap();
    assert!(out.stdout == expected, "table1 report drifted from tests/golden/table1.json");
    let v = report(&out);
    assert_eq!(v["results"]["all_match"], true);
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
        .map(|i| {
            let json = dir.path().join(format!("r{i}.json"));
            let csv = dir.path().join(format!("r{i}.csv"));
            let out = qdverify(&["table1", "--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0));
            assert!(out.stdout.is_empty());
            (fs::read(&json).unwrap(), fs::read(&csv).unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn squeezed_record_reports_both_modes() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("honda.json");
    fs::write(&rec, r#"{"label": "Honda-I", "X_db": -2.0, "Y_db": 6.0, "Xp_db": -0.07, "Yp_db": 0.49}"#).unwrap();
    let out = qdverify(&["squeezed", rec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert_eq!(v["results"]["selected"]["mode"], "as_published");
    assert_eq!(v["results"]["alternative"]["mode"], "pure_target");
    assert!((v["results"]["selected"]["rhs_min"].as_f64().unwrap() - 0.99385).abs() < 1e-5);

    let out = qdverify(&["squeezed", rec.to_str().unwrap(), "--mode", "pure-target"]);
    assert_eq!(report(&out)["results"]["selected"]["mode"], "pure_target");

    fs::write(&rec, r#"{"label": "bad", "X_db": -6.0, "Y_db": 1.0, "Xp_db": 0.0, "Yp_db": 0.0}"#).unwrap();
    assert_eq!(qdverify(&["squeezed", rec.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn coherent_task() {
    let out = qdverify(&["coherent", "--alpha", "1", "--eta", "0.9", "--a", "0.999", "--b", "0.999"]);
    assert_eq!(out.status.code(), Some(0));
    let v = report(&out);
    assert!((v["results"]["gamma"].as_f64().unwrap() - (-2.0f64).exp()).abs() < 1e-15);
    assert!((v["results"]["gamma_prime"].as_f64().unwrap() - (-1.8f64).exp()).abs() < 1e-15);
}

#[test]
fn oracle_check_small() {
    let out = qdverify(&[
        "oracle-check",
        "--resolution",
        "256",
        "--random-draws",
        "200",
        "--fock-pairs",
        "2",
        "--fock-dim",
        "60",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(report(&out)["results"]["all_passed"], true);
}
