//! End-to-end tests of the `strata` binary: every subcommand against the
//! bundled fixtures, exit-code conventions, and report determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn strata(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        String::from_utf8(output.stderr).expect("stderr is UTF-8"),
    )
}

fn tmp_file(name: &str, contents: &str) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).expect("write temp file");
    path
}

#[test]
fn exquo_reports_the_twisted_stratification() {
    let action = fixtures().join("sl5d-action.json");
    let rho = fixtures().join("rho.json");
    let (code, stdout, _) = strata(&[
        "exquo",
        "--action",
        action.to_str().unwrap(),
        "--cocycle",
        rho.to_str().unwrap(),
        "--report",
        "json",
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("JSON report");
    assert_eq!(report["kind"], "twisted");
    assert_eq!(report["pass"], true);
    let multiplicities: Vec<u64> = report["strata"]
        .as_array()
        .expect("strata rows")
        .iter()
        .map(|r| r["multiplicity"].as_u64().expect("multiplicity"))
        .collect();
    let mut sorted = multiplicities.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, vec![1, 1, 2, 2, 2]);
}

#[test]
fn exquo_cross_checks_the_plain_quotient_at_torsion_points() {
    let action = fixtures().join("sl5d-action.json");
    let (code, stdout, _) =
        strata(&["exquo", "--action", action.to_str().unwrap(), "--m", "12"]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("plain extended quotient: 5 strata"), "stdout: {stdout}");
    assert!(stdout.contains("fiber sizes match"), "stdout: {stdout}");
    assert!(stdout.trim_end().ends_with("result: pass"), "stdout: {stdout}");
}

#[test]
fn hecke_check_passes_from_flags_and_from_the_request_file() {
    let (code, from_flags, _) =
        strata(&["hecke", "check", "--spec", "A_SL:3", "--radius", "6"]);
    assert_eq!(code, 0, "stdout: {from_flags}");
    assert!(from_flags.contains("quadratic relation (3 generators): pass"));
    assert!(from_flags.trim_end().ends_with("result: pass"));

    let request = fixtures().join("sl3-hecke.json");
    let (code, from_file, _) =
        strata(&["hecke", "check", "--request", request.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(from_flags, from_file, "flag and request runs must agree byte for byte");
}

#[test]
fn hecke_check_works_for_the_gl_lattice() {
    let (code, stdout, _) =
        strata(&["hecke", "check", "--spec", "A_GL:2", "--radius", "6"]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("quadratic relation (2 generators): pass"));
}

#[test]
fn glue_closure_finds_the_second_origin_copy() {
    let model = fixtures().join("doubled-line.json");
    let (code, stdout, _) = strata(&[
        "glue",
        "--model",
        model.to_str().unwrap(),
        "--query",
        "closure",
        "--set",
        "punctured-line",
        "--point",
        "origin:2",
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("contains (0) copy 2: true"), "stdout: {stdout}");
}

#[test]
fn glue_multiplicity_sees_the_doubling() {
    let model = fixtures().join("doubled-line.json");
    let model = model.to_str().unwrap();
    let (code, stdout, _) =
        strata(&["glue", "--model", model, "--query", "multiplicity", "--point", "origin"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("multiplicity at (0): 2"), "stdout: {stdout}");

    let (code, stdout, _) =
        strata(&["glue", "--model", model, "--query", "multiplicity", "--point", "[\"3\"]"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("multiplicity at (3): 1"), "stdout: {stdout}");
}

#[test]
fn glue_compare_distinguishes_the_bundled_models() {
    let doubled = fixtures().join("doubled-line.json");
    let disjoint = fixtures().join("line-and-point.json");
    let (code, stdout, _) = strata(&[
        "glue",
        "--model",
        doubled.to_str().unwrap(),
        "--query",
        "compare",
        "--with",
        disjoint.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("not homeomorphic"), "stdout: {stdout}");
    assert!(stdout.contains("components"), "stdout: {stdout}");
    assert!(stdout.contains("non_separated_pair"), "stdout: {stdout}");
}

#[test]
fn certify_verifies_the_bundled_certificate() {
    let cert = fixtures().join("doubled-point-certificate.json");
    let samples = fixtures().join("doubled-point-samples.json");
    let (code, stdout, _) = strata(&[
        "certify",
        "--certificate",
        cert.to_str().unwrap(),
        "--samples",
        samples.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("step 0 morphism(forward): pass"), "stdout: {stdout}");
    assert!(stdout.contains("step 1 morphism(backward): pass"), "stdout: {stdout}");
    assert!(stdout.trim_end().ends_with("result: pass"));
}

#[test]
fn fiber_blocks_split_at_the_doubled_point() {
    let algebra = fixtures().join("doubled-point-algebra.json");
    let algebra = algebra.to_str().unwrap();
    let (code, stdout, _) =
        strata(&["fiber", "--algebra", algebra, "--point", "[\"0\"]"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("blocks: [1, 1]"), "stdout: {stdout}");

    let (code, stdout, _) =
        strata(&["fiber", "--algebra", algebra, "--point", "[\"2\"]"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("blocks: [2]"), "stdout: {stdout}");
}

#[test]
fn selftest_runs_a_single_criterion() {
    let (code, stdout, _) = strata(&["selftest", "--criterion", "10"]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("pass criterion 10: closure facts"), "stdout: {stdout}");
    assert!(stdout.contains("result: pass (1/1 criteria)"), "stdout: {stdout}");
}

#[test]
fn reports_are_deterministic() {
    let action = fixtures().join("gl2-iwahori.json");
    let args =
        ["exquo", "--action", action.to_str().unwrap(), "--report", "json"];
    let (code, first, _) = strata(&args);
    assert_eq!(code, 0);
    let (_, second, _) = strata(&args);
    assert_eq!(first, second, "identical inputs must give byte-identical reports");
    let report: serde_json::Value = serde_json::from_str(&first).expect("JSON report");
    assert_eq!(report["census"]["total"], 2);
}

#[test]
fn empty_documents_are_input_errors() {
    let empty = tmp_file("empty.json", "");
    let (code, _, stderr) = strata(&["exquo", "--action", empty.to_str().unwrap()]);
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.contains("cannot parse"), "stderr: {stderr}");
}

#[test]
fn non_unimodular_actions_are_input_errors() {
    let bad = tmp_file(
        "bad-action.json",
        r#"{
  "rank": 2,
  "group": { "order": 2, "table": [[0, 1], [1, 0]] },
  "matrices": { "0": [[1, 0], [0, 1]], "1": [[1, 1], [0, 2]] }
}"#,
    );
    let (code, _, stderr) = strata(&["exquo", "--action", bad.to_str().unwrap()]);
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.contains("error:"), "stderr: {stderr}");
}

#[test]
fn unknown_names_and_bad_flags_are_input_errors() {
    let model = fixtures().join("doubled-line.json");
    let model = model.to_str().unwrap();
    let (code, _, stderr) = strata(&[
        "glue", "--model", model, "--query", "closure", "--set", "nonsense", "--point",
        "origin",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown set"), "stderr: {stderr}");

    let (code, _, stderr) = strata(&["selftest", "--criterion", "11"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("between 1 and 10"), "stderr: {stderr}");

    let (code, _, stderr) = strata(&[
        "glue", "--model", model, "--query", "closure", "--set", "whole", "--point",
        "origin:0",
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("numbered from 1"), "stderr: {stderr}");
}
