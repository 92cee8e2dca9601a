//! End-to-end checks of the `ehrhart` binary: outputs, exit codes, JSON round trips.

use std::process::{Command, Output};

use ehrhart_core::exactpoly::{IntPoly, PolyJson};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ehrhart")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn hstar_examples() {
    assert_eq!(ok(&["hstar", "--q", "1,5,6,8,-3,-7", "--n", "20"]).trim(), "1 + 7*x^3 + 9*x^4 + 3*x^5");
    assert_eq!(ok(&["hstar", "--q", "1,1", "--n", "13"]).trim(), "1 + 12*x^2");
    assert_eq!(ok(&["hstar", "--q", "0,0", "--n", "1"]).trim(), "1");
    assert_eq!(
        ok(&["hstar", "--q", "1,5,6,8,-3,-7", "--n", "20", "--method", "naive"]).trim(),
        "1 + 7*x^3 + 9*x^4 + 3*x^5"
    );
}

#[test]
fn hstar_exit_codes() {
    assert_eq!(code(&["hstar", "--q", "1,x", "--n", "5"]), 64);
    assert_eq!(code(&["hstar", "--q", "1,1"]), 64);
    assert_eq!(code(&["hstar", "--q", "1,1", "--n", "0"]), 65);
    // q_d = -9 exceeds n in magnitude, so only the naive sum applies.
    assert_eq!(code(&["hstar", "--q", "1,1,4,4", "--n", "5", "--method", "fast"]), 65);
    assert_eq!(ok(&["hstar", "--q", "1,1,4,4", "--n", "5"]).trim(), "1 + 4*x^3");
}

#[test]
fn hstar_json_round_trips() {
    let v = json(&["hstar", "--q", "1,5,6,8,-3,-7", "--n", "20", "--json"]);
    let pj: PolyJson = serde_json::from_value(v["hstar"].clone()).unwrap();
    assert_eq!(pj.var, "x");
    let p = IntPoly::from_json(&pj).unwrap();
    assert_eq!(p.to_string(), "1 + 7*x^3 + 9*x^4 + 3*x^5");
    assert_eq!(v["simplex"]["q_last"], serde_json::json!(-9));
    assert_eq!(v["normalized_volume"], serde_json::json!(20));
}

#[test]
fn huge_integers_stay_exact() {
    let n = "1000000000000000000000000000000";
    let v = json(&["hstar", "--q", "1,1", "--n", n, "--method", "fast", "--json"]);
    assert_eq!(v["simplex"]["n"].to_string(), n);
    let p = IntPoly::from_json(&serde_json::from_value(v["hstar"].clone()).unwrap()).unwrap();
    assert_eq!(p.to_string(), "1 + 999999999999999999999999999999*x^2");
}

#[test]
fn family_characteristic_polynomials() {
    let out = ok(&["family", "--q", "1,2,3,3,4,-5", "--n", "420"]);
    assert!(out.contains("L1 = 159*x^2 + 102*x^3 + 159*x^4"), "{out}");
    let v = json(&["family", "--q", "1,2,3,3,4,-5", "--n", "420", "--m", "3", "--json"]);
    let h = IntPoly::from_json(&serde_json::from_value(v["hstar"].clone()).unwrap()).unwrap();
    let direct = ok(&["hstar", "--q", "1,2,3,3,4,-5", "--n", "1260"]);
    assert_eq!(h.to_string(), direct.trim());
    // q_d = 2 does not divide n = 5.
    assert_eq!(code(&["family", "--q", "1,-2", "--n", "5"]), 65);
}

#[test]
fn family_closed_forms_agree_with_naive() {
    for args in [
        vec!["family", "--kind", "r-odd", "--s", "1", "--k", "3", "--a", "1"],
        vec!["family", "--kind", "r-even", "--s", "1", "--k", "2", "--a", "1"],
        vec!["family", "--kind", "extended-reeve", "--s", "2", "--d", "4"],
        vec!["family", "--kind", "all-minus-ones", "--d", "4", "--m", "2"],
        vec!["family", "--kind", "pow2", "--d", "4", "--m", "1"],
    ] {
        let out = ok(&args);
        assert!(out.contains("naive sum: agrees"), "{args:?}: {out}");
    }
    assert_eq!(code(&["family", "--kind", "pow2", "--m", "1"]), 64);
}

#[test]
fn eulerian_and_sdm() {
    let expected = "x + 26*x^2 + 66*x^3 + 26*x^4 + x^5";
    assert_eq!(ok(&["eulerian", "--d", "5"]).trim(), expected);
    assert_eq!(ok(&["eulerian", "--d", "5", "--method", "descent"]).trim(), expected);
    let v = json(&["sdm", "--d", "3", "--m", "1", "--what", "hstar", "--json"]);
    let h = IntPoly::from_json(&serde_json::from_value(v["hstar"].clone()).unwrap()).unwrap();
    assert_eq!(h.to_string(), "1 + 4*x + x^2");
    let v = json(&["sdm", "--d", "3", "--m", "2", "--what", "vertices", "--json"]);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
    assert!(ok(&["sdm", "--d", "3", "--m", "2", "--what", "ehrhart"]).contains("t^3"));
}

#[test]
fn ehrhart_and_verify_on_a_simplex() {
    let out = ok(&["ehrhart", "--q", "1,1", "--n", "13"]);
    assert!(out.contains("i(t) = 1 - 1/6*t + t^2 + 13/6*t^3"), "{out}");
    assert!(out.contains("sign vector: -"), "{out}");
    assert!(ok(&["verify", "--q", "2,3", "--n", "7", "--tmax", "4"]).contains("agree"));
}

#[test]
fn sign_construct_examples() {
    let out = ok(&["sign-construct", "--pattern", "-"]);
    assert!(out.contains("reeve") && out.contains("13"), "{out}");
    let v = json(&["sign-construct", "--pattern", "-+--", "--json"]);
    assert_eq!(v["verified"], Value::Bool(true));
    assert_eq!(v["dim"], serde_json::json!(6));
    assert!(v["trace"].as_array().unwrap().iter().any(|s| s["case"] == "case 6"), "{v}");
    assert_eq!(code(&["sign-construct", "--pattern", "+0-"]), 64);
    assert_eq!(code(&["sign-construct", "--pattern", ""]), 64);
    assert_eq!(code(&["sign-construct", "--pattern", "---", "--max-param-bits", "1"]), 2);
}

#[test]
fn constructed_witnesses_round_trip_through_ehrhart_and_verify() {
    for pattern in ["-", "+-", "--", "-+-", "++-+"] {
        let v = json(&["sign-construct", "--pattern", pattern, "--json"]);
        let expr = v["expr"].to_string();
        let e = json(&["ehrhart", "--expr", &expr, "--json"]);
        assert_eq!(e["sign_vector"], v["sign_vector"], "{pattern}");
        assert_eq!(e["ehrhart"]["poly"], v["ehrhart"]["poly"], "{pattern}");
        let o = Command::new(env!("CARGO_BIN_EXE_ehrhart"))
            .args(["verify", "--expr", &expr, "--tmax", "1"])
            .env("EHRHART_MAX_ORACLE_POINTS", "10000000")
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{pattern}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn sweep_all_patterns() {
    let v = json(&["sign-construct", "--all", "4", "--json"]);
    assert_eq!(v["total"], serde_json::json!(16));
    assert_eq!(v["failures"], serde_json::json!(0));
}

#[test]
fn bench_reports() {
    let out = ok(&["bench", "--sum-q", "10000", "--n", "1000000000000", "--trials", "3"]);
    assert!(out.contains("naive: skipped (n too large)"), "{out}");
    let out = ok(&["bench", "--sum-q", "100", "--n", "10000", "--trials", "3"]);
    assert!(out.contains("outputs equal"), "{out}");
    assert_eq!(ok(&["bench", "--trials", "0"]).trim(), "no trials");
    let csv = ok(&["bench", "--trials", "2", "--csv"]);
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn usage_and_help() {
    assert_eq!(code(&[]), 64);
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
}
