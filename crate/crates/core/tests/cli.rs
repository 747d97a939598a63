use std::process::Command;

use ruijsenaars::cli::report::SuiteRun;
use ruijsenaars::cli::run;
use serde_json::Value;

fn ruij(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ruij").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const P1: &str = r#"{"n":1,"omega1":1,"omega2":2,"g":0.8}"#;
const P2: &str = r#"{"n":2,"omega1":1,"omega2":2,"g":0.8}"#;

#[test]
fn non_positive_coupling_is_a_usage_error() {
    let (code, _, err) = ruij(&["--params", r#"{"n":2,"omega1":1,"omega2":2,"g":-0.5}"#, "measure", "--kind", "delta", "--x", "0.1,0.2"]);
    assert_eq!(code, 2);
    assert!(err.contains("Re g"), "{err}");
    let (code, _, err) = ruij(&["--params", r#"{"n":2,"omega1":-1,"omega2":2,"g":0.5}"#, "measure", "--kind", "mu", "--x", "0.1"]);
    assert_eq!(code, 2);
    assert!(err.contains("omega1"), "{err}");
}

#[test]
fn unknown_flags_and_suites_are_usage_errors() {
    assert_eq!(ruij(&["verify", "--bogus"]).0, 2);
    assert_eq!(ruij(&["verify", "--suite", "nope"]).0, 2);
    assert_eq!(ruij(&["--params", P1, "transform", "verify", "--check", "delta", "--n", "2"]).0, 2);
    assert_eq!(ruij(&["--help"]).0, 0);
}

#[test]
fn s2_suite_passes_and_is_reproducible() {
    let (code, out, _) = ruij(&["verify", "--suite", "s2", "--seed", "7"]);
    assert_eq!(code, 0);
    let a: SuiteRun = serde_json::from_str(&out).unwrap();
    assert!(a.pass);
    assert_eq!(a.seed, 7);
    assert!(a.reports.iter().all(|r| r.pass && r.max_residual <= r.tolerance));
    let (_, again, _) = ruij(&["verify", "--suite", "s2", "--seed", "7"]);
    let b: SuiteRun = serde_json::from_str(&again).unwrap();
    let strip = |r: &SuiteRun| r.reports.iter().map(|x| x.without_timing()).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
    let (_, other, _) = ruij(&["verify", "--suite", "s2", "--seed", "8"]);
    let c: SuiteRun = serde_json::from_str(&other).unwrap();
    assert_ne!(strip(&a), strip(&c));
}

#[test]
fn suite_report_does_not_depend_on_grouping() {
    let (_, alone, _) = ruij(&["verify", "--suite", "s2-values", "--seed", "3"]);
    let (_, group, _) = ruij(&["verify", "--suite", "s2", "--seed", "3"]);
    let a: SuiteRun = serde_json::from_str(&alone).unwrap();
    let g: SuiteRun = serde_json::from_str(&group).unwrap();
    let in_group: Vec<_> = g.reports.iter().filter(|r| r.suite == "s2-values").map(|r| r.without_timing()).collect();
    assert_eq!(a.reports.iter().map(|r| r.without_timing()).collect::<Vec<_>>(), in_group);
}

#[test]
fn tolerance_override_turns_checks_red() {
    let (code, out, _) = ruij(&["verify", "--suite", "s2-functional", "--tol", "0"]);
    assert_eq!(code, 1);
    let r: SuiteRun = serde_json::from_str(&out).unwrap();
    assert!(!r.pass);
}

#[test]
fn csv_and_pretty_outputs() {
    let (code, out, _) = ruij(&["verify", "--suite", "s2-values", "--output", "csv"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.headers().unwrap().get(5), Some("max_residual"));
    assert_eq!(rdr.records().count(), 1);
    let (_, out, _) = ruij(&["verify", "--suite", "s2-values", "--output", "pretty"]);
    assert!(out.starts_with("PASS"));
}

#[test]
fn s2_eval_known_value() {
    let (code, out, _) = ruij(&["s2", "eval", "--z", "1,0", "--z", "2", "--omega1", "1", "--omega2", "2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let re = v["rows"][0]["value"][0].as_f64().unwrap();
    assert!((re - 2f64.sqrt()).abs() < 1e-12);
    assert!(v["rows"][0]["error_estimate"].as_f64().unwrap() < 1e-10);
}

#[test]
fn s2_eval_flags_a_pole() {
    let (code, out, _) = ruij(&["s2", "eval", "--z", "3,0", "--omega1", "1", "--omega2", "2"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"][0]["flag"], "pole");
}

#[test]
fn one_particle_wave_function_is_a_plane_wave() {
    let (code, out, _) = ruij(&["--params", P1, "wavefn", "eval", "--lam", "0.7", "--x", "0.3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let z = &v["rows"][0]["value"];
    let ph = 2.0 * std::f64::consts::PI * 0.21;
    assert!((z[0].as_f64().unwrap() - ph.cos()).abs() < 1e-14);
    assert!((z[1].as_f64().unwrap() - ph.sin()).abs() < 1e-14);
}

#[test]
fn measure_reports_the_regime() {
    let (code, out, _) = ruij(&["--params", P2, "measure", "--kind", "mu-multi", "--x", "0.3,-0.4"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["params"]["regime"], "I");
    assert!(v["rows"][0]["value"][0].as_f64().unwrap() > 0.0);
    let (code, _, _) = ruij(&["--params", P2, "measure", "--kind", "delta", "--x", "0.3"]);
    assert_eq!(code, 2);
}

#[test]
fn ham_apply_on_a_gaussian() {
    let f = r#"{"width":1.0,"center":0.0}"#;
    let (code, out, _) = ruij(&["--params", P2, "ham", "apply", "--f", f, "--x", "0.2,-0.3", "--s", "2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["rows"][0]["value"][0].is_number());
}

#[test]
fn transform_eval_one_particle() {
    let f = r#"{"width":1.0,"center":0.0}"#;
    let (code, out, _) = ruij(&["--params", P1, "transform", "eval", "--f", f, "--lam", "0.2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let want = std::f64::consts::PI.sqrt() * (-(std::f64::consts::PI * 0.2f64).powi(2)).exp();
    assert!((v["rows"][0]["value"][0].as_f64().unwrap() - want).abs() < 1e-10);
}

#[test]
fn transform_verify_one_particle_checks() {
    for check in ["inversion", "parseval", "u-squared"] {
        let (code, out, err) = ruij(&["transform", "verify", "--check", check, "--n", "1"]);
        assert_eq!(code, 0, "{check}: {out} {err}");
    }
}

#[test]
fn tabulate_rows_and_pole_flags() {
    let (code, out, _) = ruij(&["tabulate", "--kind", "s2", "--from", "-2", "--to", "4", "--points", "7"]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let h: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(h, ["x1_re", "x1_im", "value_re", "value_im", "error_estimate", "flag"]);
    let flags: Vec<String> = rdr.records().map(|r| r.unwrap()[5].to_string()).collect();
    assert_eq!(flags.len(), 7);
    assert_eq!(flags[0], "zero");
    assert_eq!(flags[6], "pole");
    let (code, out, _) = ruij(&["--params", P2, "tabulate", "--kind", "delta", "--from", "0,0", "--to", "1:0.1,-1", "--points", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);
}

#[test]
fn list_names_every_suite() {
    let (code, out, _) = ruij(&["verify", "--list"]);
    assert_eq!(code, 0);
    for s in ruijsenaars::cli::suites::SUITES {
        assert!(out.contains(s.name));
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ruij");
    let ok = Command::new(bin).args(["verify", "--suite", "s2-values"]).env("RUIJ_WORKERS", "1").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["--params", r#"{"omega1":1,"omega2":2,"g":0}"#, "measure", "--kind", "mu", "--x", "0.1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("Re g"));
}
