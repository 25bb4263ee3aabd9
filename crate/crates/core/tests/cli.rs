//! End-to-end runs of the `hstick` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hstick(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hstick"));
    cmd.args(args).env_remove("HSTICK_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("HSTICK_OUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_biquadratic_field() {
    let o = hstick(&["analyze", "--field", "2,5", "--s", "2,5"], None);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["indices"]["s_over_r"], "16");
    assert_eq!(r["indices"]["r_over_stick"], r["indices"]["k2_predicted"]);
    assert_eq!(r["header"]["field"], "2,5");
    assert!(r.get("timing").is_none());
    let verdicts = r["verdicts"].as_array().unwrap();
    assert!(verdicts.iter().all(|v| v["status"] != "failed"));
    assert!(verdicts
        .iter()
        .all(|v| !v["anchor"].as_str().unwrap().is_empty()));
}

#[test]
fn analyze_quadratic_field_is_fully_verified() {
    let o = hstick(&["analyze", "--field", "5", "--s", "5"], None);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let diag = r["lattices"]["bt"]["subfields"][0]["k2_minus"].clone();
    assert_eq!(r["lattices"]["fit_s_predicted"], r["lattices"]["stick_s"]);
    assert!(diag.is_string());
}

#[test]
fn analyze_rejects_dependent_generators() {
    let o = hstick(&["analyze", "--field", "2,8"], None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn analyze_completes_s_with_warning() {
    let o = hstick(&["analyze", "--field", "3,7", "--s", "2"], None);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: added ramified primes [3, 7]"));
    assert_eq!(json(&o)["header"]["s_added"], serde_json::json!([3, 7]));
}

#[test]
fn reports_are_deterministic() {
    let a = hstick(&["analyze", "--field", "3,7", "--s", "2,3,7"], None);
    let b = hstick(&["analyze", "--field", "3,7", "--s", "2,3,7"], None);
    assert_eq!(a.stdout, b.stdout);
    let t = hstick(
        &["analyze", "--field", "3,7", "--s", "2,3,7", "--timing"],
        None,
    );
    assert!(json(&t)["timing"]["lattices"].is_number());
}

#[test]
fn verify_rejects_incomplete_s() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[[case]]\nfield = [3, 7]\ns = [2, 3]\n").unwrap();
    let o = hstick(&["verify", "--battery", path.to_str().unwrap()], None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing ramified primes [7]"));
}

#[test]
fn verify_single_field_battery() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.toml");
    std::fs::write(
        &path,
        "prime_bound = 2000\n[[case]]\nfield = [2, 5]\ns = [2, 5]\n",
    )
    .unwrap();
    let o = hstick(
        &[
            "verify",
            "--battery",
            path.to_str().unwrap(),
            "--cases",
            "4",
            "--out",
            "v.json",
        ],
        Some(dir.path()),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let table = String::from_utf8_lossy(&o.stdout);
    for claim in [
        "ann_closed_form",
        "stick_closed_form",
        "stick_index_equals_k2",
    ] {
        assert!(table.contains(claim), "{claim} missing");
    }
    let v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(v["prime_bound"], 2000);
    assert_eq!(v["failed"], 0);
}

#[test]
fn verify_default_battery() {
    let o = hstick(&["verify", "--cases", "6"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn search_family() {
    let o = hstick(&["search", "--r-max", "100"], None);
    assert_eq!(code(&o), 2);
    let rows = json(&o);
    let rs: Vec<u64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["r"].as_u64().unwrap())
        .collect();
    assert_eq!(rs, vec![7, 14, 23, 31, 46, 47, 62, 71, 79, 94]);
    for row in rows.as_array().unwrap() {
        let r = row["r"].as_i64().unwrap();
        let x = row["norm_witness"][0].as_i64().unwrap();
        let y = row["norm_witness"][1].as_i64().unwrap();
        assert_eq!(x * x - 2 * y * y, r);
    }
}

#[test]
fn search_flags_s_primes_one_mod_four() {
    let o = hstick(&["search", "--r-max", "10", "--extra-s", "5"], None);
    assert!(String::from_utf8_lossy(&o.stderr).contains("r = 7 has S primes = 1 mod 4: [5]"));
    let row = &json(&o)[0];
    assert_eq!(row["s_policy_violations"], serde_json::json!([5]));
}

#[test]
fn emit_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = hstick(
        &["analyze", "--field", "2,5", "--s", "2,5", "--out", "r.json"],
        Some(dir.path()),
    );
    assert_eq!(code(&o), 2);
    let report = dir.path().join("r.json");
    let original = std::fs::read(&report).unwrap();
    let input = report.to_str().unwrap();

    let j = hstick(&["emit", "--input", input, "--format", "json"], None);
    assert_eq!(code(&j), 0);
    assert_eq!(j.stdout, original);

    let c = hstick(&["emit", "--input", input, "--format", "csv"], None);
    let csv = String::from_utf8(c.stdout).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("chi,d,disc,"));

    let m = hstick(&["emit", "--input", input, "--format", "markdown"], None);
    let md = String::from_utf8(m.stdout).unwrap();
    assert!(md.contains("| claim | status | lhs | rhs |"));
    assert!(md.contains("| stick_closed_form | verified |"));

    let bad = hstick(
        &[
            "emit",
            "--input",
            input,
            "--format",
            "csv",
            "--out",
            "/nonexistent/dir/x.csv",
        ],
        None,
    );
    assert_eq!(code(&bad), 1);
}
