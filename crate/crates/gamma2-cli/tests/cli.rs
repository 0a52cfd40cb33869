//! End-to-end tests of the binary: golden outputs, formats, and the
//! exit-code contract (0 pass, 1 verification failure, 2 usage/overflow).

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn gamma2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamma2"))
        .args(args)
        .env_remove("GAMMA2_JOBS")
        .output()
        .expect("failed to run binary")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

#[test]
fn compute_k1_text_golden() {
    let out = gamma2(&["compute", "--k", "1", "--format", "text"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(
        stdout_of(&out),
        "f = 1 - 4*x1*y1\nh = 2*x1\nt = -2*y1\ng = 1\np = 2 - 4*x1*y1\n"
    );
}

#[test]
fn compute_k0_identity() {
    let out = gamma2(&["compute", "--k", "0"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).contains("p = 2\n"));
}

#[test]
fn compute_with_sigma_golden() {
    let out = gamma2(&["compute", "--k", "1", "--sigma", "+-", "--format", "text"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).contains("p^\u{3c3} = 6 + 4*x1 + 4*y1 + 4*x1*y1\n"));
}

#[test]
fn compute_sigma_length_mismatch_is_usage_error() {
    let out = gamma2(&["compute", "--k", "2", "--sigma", "+-"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn compute_json_parses_back() {
    let out = gamma2(&["compute", "--k", "2", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["schema"], "gamma2.compute/v1");
    let p = gamma2_core::MultilinearPoly::from_json_value(&value["p"]).unwrap();
    assert_eq!(p, gamma2_core::compute_f(2).unwrap().trace().unwrap());
}

#[test]
fn compute_csv_rows() {
    let out = gamma2(&["compute", "--k", "1", "--format", "csv"]);
    let text = stdout_of(&out);
    assert!(text.starts_with("entry,mask,coeff\n"));
    assert!(text.contains("f,0,1\n"));
    assert!(text.contains("f,3,-4\n"));
    assert!(text.contains("p,0,2\n"));
}

#[test]
fn verify_small_k_passes() {
    let out = gamma2(&["verify", "--k", "2"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).contains("all good = true"));
}

#[test]
fn verify_k0_is_usage_error() {
    let out = gamma2(&["verify", "--k", "0"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_cap_requires_flag() {
    let out = gamma2(&["verify", "--k", "7"]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--unsafe-large"));
}

#[test]
fn verify_with_certificate_word_matrix() {
    let out = gamma2(&["verify", "--k", "1", "--matrix", "[[3,2],[-2,-1]]"]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn verify_with_bad_combination_fails_with_witness() {
    let out = gamma2(&[
        "verify", "--k", "1", "--matrix", "[[1,0],[0,-6]]", "--format", "json",
    ]);
    assert_eq!(exit_code(&out), 1);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["all_good"], false);
    assert_eq!(value["counterexample"]["kind"], "mixed");
    assert_eq!(value["counterexample"]["sigma"], "-+");
}

#[test]
fn per_sigma_table_is_flag_gated() {
    let without = gamma2(&["verify", "--k", "1", "--format", "json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&without)).unwrap();
    assert!(value.get("per_sigma").is_none());

    let with = gamma2(&["verify", "--k", "1", "--format", "json", "--per-sigma"]);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&with)).unwrap();
    assert_eq!(value["per_sigma"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_json_output_is_deterministic() {
    let run = || {
        let out = gamma2(&["verify", "--k", "2", "--format", "json", "--per-sigma", "--jobs", "2"]);
        assert_eq!(exit_code(&out), 0);
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn goodness_reads_stdin_and_flags_mixed() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gamma2"))
        .args(["goodness", "--input", "-", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"k":1,"terms":[{"vars":[0],"coeff":"1"},{"vars":[1],"coeff":"-1"}]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["counterexample"]["kind"], "mixed");
}

#[test]
fn goodness_accepts_good_polynomial_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p1.json");
    std::fs::write(
        &path,
        r#"{"k":1,"terms":[{"vars":[],"coeff":"2"},{"vars":[0,1],"coeff":"-4"}]}"#,
    )
    .unwrap();
    let out = gamma2(&["goodness", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn goodness_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "not json").unwrap();
    let out = gamma2(&["goodness", "--input", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn certify_small_run_passes() {
    let out = gamma2(&["certify", "--depth", "2", "--k", "1", "--samples", "5", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["schema"], "gamma2.certificate-report/v1");
    assert_eq!(value["all_ok"], true);
    assert_eq!(value["checks"]["delta"]["collisions"], 0);
}

#[test]
fn certify_csv_has_per_check_rows() {
    let out = gamma2(&["certify", "--depth", "2", "--k", "1", "--samples", "5", "--format", "csv"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.starts_with("check,ok,detail\n"));
    for check in ["identities", "cone_decompositions", "recursion", "base_equivalence", "delta"] {
        assert!(text.contains(&format!("{check},true")), "missing row for {check}");
    }
}

#[test]
fn certify_depth6_k3_passes() {
    let out = gamma2(&["certify", "--depth", "6", "--k", "3", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["all_ok"], true);
    // the report echoes the requested depth
    assert_eq!(value["checks"]["delta"]["depth"], 6);
    assert_eq!(value["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn certify_depth_zero_is_usage_error() {
    let out = gamma2(&["certify", "--depth", "0"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn certify_depth_cap_requires_flag() {
    let out = gamma2(&["certify", "--depth", "11"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn oracle_single_point_matches() {
    let out = gamma2(&["oracle", "--k", "1", "--point", "1,1"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).contains("oracle = -2"));

    let out = gamma2(&["oracle", "--k", "2", "--point", "1,1,1,1"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).contains("oracle = 2"));
}

#[test]
fn oracle_trials_all_agree() {
    let out = gamma2(&["oracle", "--k", "3", "--trials", "200", "--seed", "7"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).contains("200/200 agree"));
}

#[test]
fn bench_reports_term_counts() {
    let out = gamma2(&["bench", "--k", "2", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["schema"], "gamma2.bench-report/v1");
    assert_eq!(value["term_counts"][0]["p"], 2);
    assert_eq!(value["term_counts"][1]["p"], 6);
    assert_eq!(value["sigma_count"], 16);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = gamma2(&[
        "compute", "--k", "1", "--format", "json", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).is_empty());
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(value["k"], 1);
}

#[test]
fn jobs_env_var_is_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_gamma2"))
        .args(["verify", "--k", "2"])
        .env("GAMMA2_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn negative_control_corrupt_a6() {
    let out = gamma2(&["certify", "--negative-control", "corrupt-a6", "--format", "json"]);
    assert_eq!(exit_code(&out), 1);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["all_ok"], false);
    assert_eq!(value["checks"]["identities"]["ok"], false);
    let failures = value["failures"].as_array().unwrap();
    assert!(failures
        .iter()
        .any(|f| f["kind"] == "identity" && f["name"].as_str().unwrap().contains("A6")));
}

#[test]
fn negative_control_mixed_poly() {
    let out = gamma2(&["certify", "--negative-control", "mixed-poly", "--format", "json"]);
    assert_eq!(exit_code(&out), 1);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["all_good"], false);
    assert_eq!(value["counterexample"]["kind"], "mixed");
    assert_eq!(value["counterexample"]["positive"]["monomial"], "x1");
    assert_eq!(value["counterexample"]["negative"]["monomial"], "y1");
}

#[test]
fn negative_control_non_decreasing() {
    let out = gamma2(&["certify", "--negative-control", "non-decreasing", "--format", "json"]);
    assert_eq!(exit_code(&out), 1);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["ok"], false);
    let failures = value["failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f["violation"] == "not_decreasing"));
    assert_eq!(failures[0]["word"], "4");
}
