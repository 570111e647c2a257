use std::fs;
use std::process::{Command, Output};

use hllab::field_lab::{build_test_field, hardy_quotient_spectral, TestFieldSpec};
use hllab::oracle_suite::AnnulusPotential;
use hllab::{make_setup, ProblemKind};

fn hllab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hllab")).args(args).output().expect("spawn hllab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn constants_csv_round_trips_exact_values() {
    let o = hllab(&["constants", "--N", "3", "--gamma", "0", "--kind", "hardy"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("N,gamma,epsilon,kind,value,argmin_nu,branch\n"));
    let rows = csv_rows(&text);
    let hardy = rows.iter().find(|r| &r[3] == "hardy").unwrap();
    assert_eq!(hardy[4].parse::<f64>().unwrap(), 25.0 / 36.0);
    assert_eq!(&hardy[2], "5.0000000000000000e-1");
}

#[test]
fn critical_weight_exits_two_and_names_the_weight() {
    let o = hllab(&["constants", "--N", "2", "--gamma", "0", "--kind", "hardy"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("gamma = 0"), "{err}");
}

#[test]
fn malformed_input_exits_two() {
    assert_eq!(hllab(&["constants", "--N", "3", "--gamma", "abc"]).status.code(), Some(2));
    assert_eq!(hllab(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{ not json").unwrap();
    let o = hllab(&["quotient", path.to_str().unwrap(), "--gamma", "0", "--kind", "hardy"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_deterministic_and_respects_thread_cap() {
    let args = ["sweep", "--N", "4", "--gamma-min", "-3", "--gamma-max", "1", "--step", "1/4", "--format", "json"];
    let a = hllab(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_hllab")).args(args).env("HLLAB_THREADS", "1").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rows: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(rows.as_array().unwrap().iter().any(|r| r["branch"] == "excluded-critical-weight"));
}

#[test]
fn sharpness_writes_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sharp.csv");
    let o = hllab(&["sharpness", "--N", "5", "--gamma", "1/2", "--kind", "rellich", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("n,q_n,limit_estimate,target_constant,relative_gap\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    let limit: f64 = rows[4][2].parse().unwrap();
    assert!((limit - 32.0).abs() <= 1e-3 * 32.0);
}

#[test]
fn quotient_of_test_field_file_matches_spectral_value() {
    let setup = make_setup(3, 0.0, ProblemKind::Hardy).unwrap();
    let spec = TestFieldSpec::new(setup, 1, 2.0).with_resolution(1001, 501);
    let field = build_test_field(&spec).unwrap();
    let spectral = hardy_quotient_spectral(&spec).unwrap().value;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.json");
    fs::write(&path, field.to_json().unwrap()).unwrap();
    let o = hllab(&["quotient", path.to_str().unwrap(), "--N", "3", "--gamma", "0", "--kind", "hardy"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    let q: f64 = rows[0][3].parse().unwrap();
    assert!((q - spectral).abs() <= 1e-3 * spectral, "{q} vs {spectral}");
    assert!(rows[0][5].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn quotient_of_annulus_potential_and_zero_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pot.json");
    fs::write(&path, serde_json::to_string(&AnnulusPotential::zonal_first_mode(2)).unwrap()).unwrap();
    let o = hllab(&["quotient", path.to_str().unwrap(), "--gamma", "1", "--kind", "hardy", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["quotient"].as_f64().unwrap() >= v["constant"].as_f64().unwrap());

    let zero = AnnulusPotential { coefficients: vec![0.0; 6], ..AnnulusPotential::zonal_first_mode(2) };
    fs::write(&path, serde_json::to_string(&zero).unwrap()).unwrap();
    let o = hllab(&["quotient", path.to_str().unwrap(), "--gamma", "1", "--kind", "hardy"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_infimum_suite_passes() {
    let o = hllab(&["verify", "--suite", "infimum", "--seed", "7"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(reports.as_array().unwrap().iter().all(|r| r["pass"] == true));
}
