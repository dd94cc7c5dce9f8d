//! The `lcft` binary end to end: reports, symbols and exit codes.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/corpus.json")
}

fn run(args: &[&str], config: &Path) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lcft"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .expect("lcft runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args, &corpus());
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

/// The shipped corpus with `edit` applied, written to a temporary file.
fn edited(edit: impl FnOnce(&mut Value)) -> tempfile::NamedTempFile {
    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(corpus()).unwrap()).unwrap();
    edit(&mut cfg);
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), serde_json::to_string(&cfg).unwrap()).unwrap();
    file
}

fn statuses(report: &Value) -> Vec<(String, String)> {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["id"].as_str().unwrap().to_string(), c["status"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn build_reports_the_field_and_its_group() {
    let (code, r) = json(&["build", "--ext", "q3-u2z3"]);
    assert_eq!(code, 0);
    assert_eq!(r["data"]["degree"], 4);
    assert_eq!(r["data"]["e"], 2);
    assert_eq!(r["data"]["f"], 2);
    assert_eq!(r["data"]["galois"]["order"], 4);
    for c in r["checks"].as_array().unwrap() {
        let mut keys: Vec<&String> = c.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(keys, ["id", "lhs", "paper_ref", "residual_valuation", "rhs", "status"]);
    }
}

#[test]
fn unramified_cocycle_matches_the_closed_form() {
    let (code, r) = json(&["cocycle", "--ext", "q2-u2"]);
    assert_eq!(code, 0);
    let s = statuses(&r);
    assert!(s.iter().any(|(id, st)| id == "q2-u2/cocycle/closed-form" && st == "pass"));
    assert!(s.iter().any(|(id, st)| id == "q2-u2/cocycle/invariant" && st == "pass"));
    assert_eq!(r["data"]["table"].as_array().unwrap().len(), 2);
}

#[test]
fn theta_of_pi_is_arithmetic_frobenius() {
    // on an unramified cubic the arithmetic Frobenius has order 3 and its
    // symbol is the class of pi
    let (code, r) = json(&["nrs", "--ext", "q3-u3", "--theta", "pi"]);
    assert_eq!(code, 0);
    assert_eq!(r["data"]["theta"]["order"], 3);
    let (_, t) = json(&["nrs", "--ext", "q3-u3"]);
    let s = r["data"]["theta"]["s"].clone();
    let entry = t["data"]["eta"].as_array().unwrap().iter().find(|e| e["s"] == s).unwrap().clone();
    assert_eq!(entry["class"], r["data"]["theta"]["class"]);
    assert!(statuses(&t).iter().any(|(id, st)| id == "q3-u3/nrs/frobenius-class" && st == "pass"));
}

#[test]
fn theta_of_two_on_q3_zeta3_is_nontrivial() {
    let (code, r) = json(&["nrs", "--ext", "q3-z3", "--theta", "2"]);
    assert_eq!(code, 0);
    assert_ne!(r["data"]["theta"]["s"], 0);
    assert_eq!(r["data"]["theta"]["order"], 2);
}

#[test]
fn eta_of_the_identity_is_trivial() {
    let (code, r) = json(&["nrs", "--ext", "q3-z9", "--eta", "id"]);
    assert_eq!(code, 0);
    assert!(r["data"]["eta"]["class"].as_array().unwrap().iter().all(|c| c == 0));
}

#[test]
fn weil_suite_includes_shafarevich_weil() {
    let (code, r) = json(&["verify", "--suite", "weil"]);
    assert_eq!(code, 0);
    let sw: Vec<&Value> =
        r["checks"].as_array().unwrap().iter().filter(|c| c["id"].as_str().unwrap().ends_with("shafarevich-weil")).collect();
    assert!(sw.iter().any(|c| c["id"] == "q3-cyclotomic/q3-z3/weil/shafarevich-weil" && c["status"] == "pass"));
    let unram = sw.iter().find(|c| c["id"] == "q2-unram/q2-u2/weil/shafarevich-weil").unwrap();
    assert_eq!(unram["lhs"]["cyclic"], true);
    assert_eq!(unram["lhs"]["order"], 4);
}

#[test]
fn weil_lifts_carry_certificates() {
    let (code, r) = json(&["weil", "--ext", "q2-u2"]);
    assert_eq!(code, 0);
    let lifts = r["data"]["lifts"].as_array().unwrap();
    assert_eq!(lifts.len(), 2);
    for l in lifts {
        assert_eq!(l["alpha_ref"], "q2-u2:auto");
        assert!(l["certificate"]["num"].as_i64().unwrap() >= 12 * l["certificate"]["den"].as_i64().unwrap());
    }
    assert!(statuses(&r).iter().any(|(id, st)| id == "q2-u2/weil/square" && st == "pass"));
}

#[test]
fn reports_are_deterministic() {
    let a = run(&["verify", "--suite", "cocycle", "--seed", "11"], &corpus());
    let b = run(&["verify", "--suite", "cocycle", "--seed", "11"], &corpus());
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}

#[test]
fn text_format_lists_checks() {
    let (code, out, _) = run(&["cocycle", "--ext", "q3-z3", "--format", "text"], &corpus());
    assert_eq!(code, 0);
    assert!(out.contains("PASS  q3-z3/cocycle/relation"));
    assert!(out.trim_end().ends_with("checks passed"));
}

#[test]
fn sabotaged_precision_exhausts_the_budget() {
    let cfg = edited(|c| c["precision"]["pi_digits"] = 2.into());
    let (code, out, _) = run(&["verify", "--suite", "solver", "--ext", "q2-u2"], cfg.path());
    assert_eq!(code, 3);
    assert!(out.contains("precision loss"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let (code, _, err) = run(&["build", "--ext", "nowhere"], &corpus());
    assert_eq!((code, err.contains("unknown extension")), (2, true));

    let bad = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(bad.path(), "{ not json").unwrap();
    assert_eq!(run(&["build", "--ext", "q2-u2"], bad.path()).0, 2);

    let cfg = edited(|c| c["bases"][0]["extensions"][0]["eisenstein"] = serde_json::json!([1, 1, 1]));
    assert_eq!(run(&["build", "--ext", "q2-u2"], cfg.path()).0, 2);

    let cfg = edited(|c| c["bases"][0]["towers"][0]["middle"] = serde_json::json!(["q2-missing"]));
    assert_eq!(run(&["build", "--ext", "q2-u2"], cfg.path()).0, 2);
}

#[test]
fn an_alpha_of_the_wrong_slope_is_a_violation() {
    // alpha = 1 has w = 0, not -1/d
    let cfg = edited(|c| {
        c["alpha"] = serde_json::json!({ "explicit": { "q2-u2": [{ "shift": 0, "coeffs": [[[1]]] }, { "shift": 0, "coeffs": [[[1]]] }] } })
    });
    let (code, out, _) = run(&["verify", "--suite", "algebra", "--ext", "q2-u2"], cfg.path());
    assert_eq!(code, 1, "{out}");
}

#[test]
fn explicit_alpha_is_used() {
    // pi^-1 on the first component, as the automatic choice, but written out
    let cfg = edited(|c| {
        c["alpha"] = serde_json::json!({ "explicit": { "q2-u2": [{ "shift": -1, "coeffs": [[[1]]] }, { "shift": 0, "coeffs": [[[1]]] }] } })
    });
    let (code, out, _) = run(&["weil", "--ext", "q2-u2"], cfg.path());
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("q2-u2:explicit"));
}

#[test]
fn degenerate_extension_has_a_trivial_table() {
    let cfg = edited(|c| c["bases"][0]["extensions"].as_array_mut().unwrap().push(serde_json::json!({ "name": "q2-k" })));
    let (code, out, _) = run(&["cocycle", "--ext", "q2-k"], cfg.path());
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["data"]["table"].as_array().unwrap().len(), 1);
}
