use std::process::{Command, Output};

use serde_json::Value;

fn qmul(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmul")).args(args).output().expect("spawn qmul")
}

fn json(args: &[&str]) -> Value {
    let out = qmul(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn estimate_json() {
    let v = json(&["estimate", "--kind", "schoolbook-addsub", "--n", "8", "--json"]);
    assert_eq!(v["formula"], 99.0);
    assert_eq!(v["counted"], 99);
    for key in ["kind", "n", "w", "formula", "counted", "nominal", "ledger", "reduction_vs_classic"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for entry in v["ledger"].as_array().unwrap() {
        assert!(entry["label"].is_string() && entry["cost"].is_number());
    }
}

#[test]
fn estimate_defaults_window_for_modp() {
    let v = json(&["estimate", "--kind", "modp-addsub", "--n", "64", "--json"]);
    assert_eq!(v["w"], 6);
    let v = json(&["estimate", "--kind", "modp-addsub", "--n", "64", "--w", "4", "--json"]);
    assert_eq!(v["formula"], 7952.0);
}

#[test]
fn simulate_text() {
    let out = qmul(&["simulate", "--kind", "mod2n-addsub", "--n", "4", "--x", "13", "--y", "11"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).lines().any(|l| l == "result = 15"));
}

#[test]
fn simulate_rejects_unreduced_inputs() {
    let out = qmul(&["simulate", "--kind", "modp-classic", "--n", "4", "--p", "13", "--w", "2", "--x", "13"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exhaustive_modp() {
    let v = json(&["verify", "--kind", "modp-addsub", "--n", "4", "--p", "13", "--w", "2", "--exhaustive", "--json"]);
    assert_eq!(v["cases_run"], 169);
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);
    assert_eq!(v["ancilla_violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["params"]["p"], "13");
    for key in ["cases_run", "mismatches", "ancilla_violations", "seed", "kind", "n", "params"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn verify_randomized_is_job_independent() {
    let args = |jobs: &'static str| {
        ["verify", "--kind", "schoolbook-addsub", "--n", "16", "--trials", "200", "--seed", "7", "--jobs", jobs, "--json"]
    };
    assert_eq!(json(&args("1")), json(&args("3")));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["estimate", "--kind", "nope", "--n", "4"],
        vec!["verify", "--kind", "adder", "--n", "4"],
        vec!["verify", "--kind", "adder", "--n", "4", "--trials", "0"],
        vec!["build", "--kind", "modp-classic", "--n", "4", "--p", "12"],
        vec!["build", "--kind", "modp-classic", "--n", "4", "--w", "5"],
        vec!["build", "--kind", "modp-classic", "--n", "4", "--p", "15", "--strict"],
        vec!["build", "--kind", "mod2n-classic", "--n", "4", "--w", "2"],
        vec!["crossover", "--pair", "schoolbook", "--threshold", "0.5"],
    ] {
        assert_eq!(qmul(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn composite_modulus_warns() {
    let out = qmul(&["build", "--kind", "modp-classic", "--n", "4", "--p", "15", "--w", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not prime"));
}

#[test]
fn crossover_and_sweep() {
    let v = json(&["crossover", "--pair", "schoolbook", "--threshold", "0.25", "--json"]);
    assert_eq!(v["n"], 8);
    let v = json(&["crossover", "--pair", "mod2n", "--threshold", "0.25", "--json"]);
    assert_eq!(v["n"], 6);
    let v = json(&["sweep-w", "--kind", "modp-classic", "--n", "4", "--json"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let min = rows.iter().map(|r| r["formula"].as_f64().unwrap()).fold(f64::INFINITY, f64::min);
    let best = rows.iter().find(|r| r["optimal"] == true).unwrap();
    assert_eq!(best["formula"].as_f64().unwrap(), min);
}

#[test]
fn emit_roundtrips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for (format, ext) in [("text", "txt"), ("json", "json")] {
        let path = dir.path().join(format!("c.{ext}"));
        let args = ["emit", "--kind", "modp-addsub", "--n", "5", "--w", "2", "--format", format, "--out", path.to_str().unwrap()];
        assert!(qmul(&args).status.success());
        let src = std::fs::read_to_string(&path).unwrap();
        let parsed = if format == "text" { qmul::text::parse(&src) } else { qmul::text::parse_json(&src) }.unwrap();
        let params = qmul_core::ModPParams::new(qmul_core::oracle::largest_prime_of_width(5), 5, 2).unwrap();
        let built = qmul_core::multipliers::build_modp(&params, qmul_core::Variant::AddSub).unwrap();
        assert_eq!(parsed, built);
    }
}

#[test]
fn build_reports_ledger() {
    let v = json(&["build", "--kind", "modp-classic", "--n", "8", "--w", "2", "--json"]);
    let ledger = v["ledger"].as_array().unwrap();
    let cascade = ledger.iter().find(|e| e["label"] == "step[0]/cascade").unwrap();
    assert_eq!(cascade["cost"], 36.0);
    assert!(v["nominal"].as_f64().unwrap() > 0.0);
}
