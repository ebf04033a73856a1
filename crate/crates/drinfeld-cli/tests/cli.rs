//! End-to-end tests for the drinfeld binary.
//!
//! Each test drives the compiled executable with a JSON configuration,
//! either piped through stdin or written to a temporary file, and checks
//! the exit code together with the structured or tabular output.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

/// A rank 2 module over F_2 at the totally ramified place (t), with the
/// t-image and the start point given exactly in pi-coordinates.
const RAMIFIED_DOC: &str = r#"{
    "module": {"q": 2, "coeffs": ["0", "1/t", "1"]},
    "place": {
        "kind": {"finite": "t"},
        "e": 3, "f": 1, "ext": 3,
        "t_image": {"pi_rational": {
            "num": {"v_min": 3, "coeffs": [1]},
            "den": {"v_min": 0, "coeffs": [1, 0, 1]}
        }}
    },
    "element": {"pi_rational": {
        "num": {"v_min": 2, "coeffs": [1]},
        "den": {"v_min": 0, "coeffs": [1, 0, 1]}
    }}
}"#;

/// The Carlitz module over F_3 at the place at infinity, evaluated at 1/t.
const CARLITZ_LOCAL_DOC: &str = r#"{
    "module": {"q": 3, "coeffs": ["t", "1"]},
    "place": {"kind": "infinity"},
    "element": {"rational": "1/t"}
}"#;

/// The Carlitz module over F_3 with a global start point.
const CARLITZ_GLOBAL_DOC: &str = r#"{
    "module": {"q": 3, "coeffs": ["t", "1"]},
    "element": {"rational": "1/t"}
}"#;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_drinfeld")
}

/// Runs the binary with the given arguments, feeding `stdin` when present.
fn run(args: &[&str], stdin: Option<&str>) -> Output {
    run_with_env(args, stdin, &[])
}

fn run_with_env(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (key, value) in env {
        cmd.env(key, value);
    }
    let mut child = cmd.spawn().expect("the binary should spawn");
    let mut handle = child.stdin.take().expect("stdin should be piped");
    handle
        .write_all(stdin.unwrap_or("").as_bytes())
        .expect("writing to stdin should succeed");
    drop(handle);
    child
        .wait_with_output()
        .expect("the binary should run to completion")
}

fn stdout_json(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8");
    serde_json::from_str(&text).expect("stdout should be a JSON document")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("the process should not be killed")
}

#[test]
fn a_deep_ramified_document_certifies_the_exact_value() {
    let out = run(&["local-height"], Some(RAMIFIED_DOC));
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], "5/192", "local height at the ramified place");
    assert_eq!(doc["certificate"], "L2-prime");
    assert_eq!(doc["in_s"], true);
    assert_eq!(doc["place"]["place"], "(t)");
    assert_eq!(doc["place"]["e"], 3);
    let valuations: Vec<i64> = doc["trajectory"]
        .as_array()
        .expect("trajectory should be an array")
        .iter()
        .map(|step| step["v"].as_i64().expect("each step should record v"))
        .collect();
    assert_eq!(valuations, [2, 1, -1, -5], "orbit valuations in order");
    let bounds = doc["bounds"].as_array().expect("bounds should be an array");
    assert!(!bounds.is_empty(), "a positive value should carry bounds");
    for bound in bounds {
        assert_eq!(bound["holds"], true, "bound {} should hold", bound["label"]);
    }
}

#[test]
fn the_carlitz_tail_value_comes_from_a_config_file() {
    let path = std::env::temp_dir().join(format!(
        "drinfeld-cli-carlitz-{}.json",
        std::process::id()
    ));
    std::fs::write(&path, CARLITZ_LOCAL_DOC).expect("the config file should be writable");
    let out = run(
        &["--config", path.to_str().expect("temp path should be UTF-8"), "local-height"],
        None,
    );
    let _ = std::fs::remove_file(&path);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], "1/9", "Carlitz local height at infinity");
    assert_eq!(doc["certificate"], "L2-prime");
    assert_eq!(doc["place"]["place"], "infinity");
}

#[test]
fn zero_elements_are_rejected() {
    let doc = r#"{
        "module": {"q": 3, "coeffs": ["t", "1"]},
        "element": {"rational": "0"}
    }"#;
    let out = run(&["global-height"], Some(doc));
    assert_eq!(exit_code(&out), 1, "zero input is an error");
    assert!(
        stderr_text(&out).contains("element must be nonzero"),
        "stderr should name the problem: {}",
        stderr_text(&out)
    );
}

#[test]
fn the_global_breakdown_sums_the_carlitz_value() {
    let out = run(&["global-height"], Some(CARLITZ_GLOBAL_DOC));
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["total"], "10/9", "canonical height of 1/t");
    let places = doc["places"].as_array().expect("places should be an array");
    let value_at = |name: &str| {
        places
            .iter()
            .find(|p| p["place"] == name)
            .unwrap_or_else(|| panic!("the breakdown should list {name}"))["value"]
            .clone()
    };
    assert_eq!(value_at("(t)"), "1", "contribution at the pole of x");
    assert_eq!(value_at("infinity"), "1/9", "contribution of the tail");
}

#[test]
fn frobenius_constants_have_height_zero() {
    let doc = r#"{
        "module": {"q": 3, "coeffs": ["0", "1"]},
        "element": {"rational": "1"}
    }"#;
    let out = run(&["global-height"], Some(doc));
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    assert_eq!(stdout_json(&out)["total"], "0", "torsion points have height zero");
}

#[test]
fn the_scaling_flag_checks_the_functional_equation() {
    let out = run(&["global-height", "--check-scaling"], Some(CARLITZ_GLOBAL_DOC));
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["scaling"]["image_height"], "10/3", "height of phi_t(1/t)");
    assert_eq!(doc["scaling"]["scaled_height"], "10/3", "q^r times the height of 1/t");
    assert_eq!(doc["scaling"]["holds"], true);
}

#[test]
fn an_exhausted_budget_reports_undecided() {
    let out = run(&["--budget", "0", "local-height"], Some(CARLITZ_LOCAL_DOC));
    assert_eq!(exit_code(&out), 2, "undecided runs use the reserved code");
    let doc = stdout_json(&out);
    assert!(doc["value"].is_null(), "no value should be certified");
    let reason = doc["undecided_reason"]
        .as_str()
        .expect("an undecided run should explain itself");
    assert!(!reason.is_empty(), "the reason should not be blank");
}

#[test]
fn the_e2_suite_passes_from_the_command_line() {
    let out = run(&["--text", "verify", "e2", "--p", "3", "--n", "1..3"], None);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let text = String::from_utf8(out.stdout).expect("stdout should be UTF-8");
    assert_eq!(text.trim(), "e2: 3/3 pass");
}

#[test]
fn identical_runs_are_byte_identical() {
    let first = run(
        &["--seed", "9", "global-height", "--check-scaling"],
        Some(CARLITZ_GLOBAL_DOC),
    );
    let second = run(
        &["--seed", "9", "global-height", "--check-scaling"],
        Some(CARLITZ_GLOBAL_DOC),
    );
    assert_eq!(exit_code(&first), 0);
    assert_eq!(
        first.stdout, second.stdout,
        "the same config and seed must reproduce the same bytes"
    );
}

#[test]
fn thresholds_match_the_hand_derivation() {
    let out = run(&["thresholds"], Some(RAMIFIED_DOC));
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["q"], 2);
    assert_eq!(doc["r"], 2);
    assert_eq!(doc["r0"], 1);
    assert_eq!(doc["v_coeffs"], serde_json::json!([null, -3, 0]));
    assert_eq!(doc["m_v"], "-3/2");
    assert_eq!(doc["n_v"], "3");
    assert_eq!(doc["in_s"], true);
    assert_eq!(doc["m_steps"], 2);
    assert_eq!(doc["l_lcm"], 1);
    assert_eq!(doc["p_all"], serde_json::json!(["-3/2", "0"]));
    assert_eq!(doc["z"], 2);
    assert_eq!(doc["f_cap"], 1);
    assert_eq!(doc["budget"], 7);
}

#[test]
fn an_escaping_multiplier_is_found_for_the_ramified_point() {
    let out = run(&["escape-multiplier"], Some(RAMIFIED_DOC));
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["b"], "1", "the point already escapes");
    assert_eq!(doc["v"], 2);
    assert_eq!(doc["degree_cap"], 2);
}

#[test]
fn torsion_points_have_no_escaping_multiplier() {
    let doc = r#"{
        "module": {"q": 2, "coeffs": ["0", "1"]},
        "place": {"kind": {"finite": "t"}},
        "element": {"rational": "1"}
    }"#;
    let out = run(&["escape-multiplier"], Some(doc));
    assert_eq!(exit_code(&out), 1, "torsion admits no escape");
    assert!(
        stderr_text(&out).contains("no escaping multiplier up to degree 1"),
        "stderr should report the search bound: {}",
        stderr_text(&out)
    );
}

#[test]
fn usage_errors_exit_with_code_one() {
    let out = run(&["not-a-command"], None);
    assert_eq!(exit_code(&out), 1, "argument errors must not collide with undecided");

    let capped = run_with_env(
        &["local-height"],
        Some(RAMIFIED_DOC),
        &[("DRINFELD_MAX_PREC", "abc")],
    );
    assert_eq!(exit_code(&capped), 1);
    assert!(
        stderr_text(&capped).contains("DRINFELD_MAX_PREC"),
        "stderr should name the variable: {}",
        stderr_text(&capped)
    );
}

#[test]
fn text_output_renders_the_trajectory_table() {
    let out = run(&["--text", "local-height"], Some(RAMIFIED_DOC));
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let text = String::from_utf8(out.stdout).expect("stdout should be UTF-8");
    assert!(text.contains("value: 5/192"), "text: {text}");
    assert!(text.contains("certificate: L2-prime"), "text: {text}");
    assert!(text.contains("trajectory:"), "text: {text}");
    assert!(text.contains("3  -5"), "the last step should be tabulated: {text}");
}
