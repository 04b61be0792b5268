use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn normhol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normhol")).args(args).output().expect("binary runs")
}

fn normhol_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_normhol"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_bbi_type2_fixture() {
    let path = fixture("type2_so3.json");
    let v = json(&normhol(&["classify-bbi", "--input", path.to_str().unwrap()]));
    assert_eq!(v["type"], "Type2");
    assert_eq!(v["m"], 3);
}

#[test]
fn curvature_space_so2_fixture() {
    let path = fixture("so2.json");
    let v = json(&normhol(&["curvature-space", "--algebra", path.to_str().unwrap()]));
    assert_eq!(v["dim_K"], 1);
    assert_eq!(v["dim_B"], 2);
}

#[test]
fn pipeline_flat_plane_is_trivial() {
    let path = fixture("flat_plane.json");
    let v = json(&normhol(&["pipeline", "--input", path.to_str().unwrap()]));
    assert_eq!(v["flags"]["trivial_holonomy"], true);
    assert_eq!(v["holonomy"]["dim"], 0);
}

#[test]
fn pipeline_output_is_byte_identical() {
    let path = fixture("flat_plane.json");
    let args = ["pipeline", "--input", path.to_str().unwrap(), "--seed", "12345"];
    let a = normhol(&args);
    let b = normhol(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.last(), Some(&b'\n'));
}

#[test]
fn reports_have_sorted_keys_and_trailing_newline() {
    let out = normhol_stdin(&["weak-berger", "--input", "-"], r#"{"so": 3}"#);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.ends_with('\n'));
    let keys: Vec<&str> = text.lines().filter_map(|l| l.trim().strip_prefix('"')?.split('"').next()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(json(&out)["is_weak_berger"], true);
}

#[test]
fn text_report() {
    let out = normhol_stdin(&["curvature-space", "--input", "-", "--report", "text"], r#"{"so": 3}"#);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dim_K: 6\n"));
    assert!(text.ends_with('\n'));
}

#[test]
fn unknown_subcommand_exits_64_with_usage() {
    let out = normhol(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn invalid_input_exits_2() {
    let out = normhol_stdin(&["curvature", "--input", "-"], "{not json");
    assert_eq!(out.status.code(), Some(2));
    let out = normhol(&["curvature", "--input", "/definitely/missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = normhol(&["curvature", "--tol", "-1", "--input", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_mode_rejects_float_literals() {
    let family = r#"{"signature": {"p": 0, "q": 2}, "tangent_dim": 2,
        "shape_operators": {"e1": [[0.5, 0], [0, 1]], "e2": [[0, 1], [1, 0]]}}"#;
    let out = normhol_stdin(&["curvature", "--input", "-"], family);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rational"));
    let v = json(&normhol_stdin(&["curvature", "--input", "-", "--mode", "float"], family));
    assert_eq!(v["trace_formula"], true);
    assert_eq!(v["mode"], "float");
}

#[test]
fn decompose_reports_bl_structure() {
    // so(2) ⊕ so(3) acting blockwise on R^5.
    let input = r#"{"generators": [
        [[0,-1,0,0,0],[1,0,0,0,0],[0,0,0,0,0],[0,0,0,0,0],[0,0,0,0,0]],
        [[0,0,0,0,0],[0,0,0,0,0],[0,0,0,-1,0],[0,0,1,0,0],[0,0,0,0,0]],
        [[0,0,0,0,0],[0,0,0,0,0],[0,0,0,0,-1],[0,0,0,0,0],[0,0,1,0,0]]
    ]}"#;
    let v = json(&normhol_stdin(&["decompose", "--input", "-"], input));
    assert_eq!(v["classification"], "decomposable");
    assert_eq!(v["borel_lichnerowicz"]["bl"], true);
    assert_eq!(v["borel_lichnerowicz"]["modules"], serde_json::json!([2, 3]));
}

#[test]
fn hex_and_decimal_seeds_agree() {
    let path = fixture("type2_so3.json");
    let a = normhol(&["classify-bbi", "--input", path.to_str().unwrap(), "--seed", "0xB10C"]);
    let b = normhol(&["classify-bbi", "--input", path.to_str().unwrap(), "--seed", "45324"]);
    assert_eq!(a.stdout, b.stdout);
}
