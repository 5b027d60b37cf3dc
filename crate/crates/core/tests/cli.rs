use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn ramforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramforge")).args(args).output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = ramforge(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(ramforge(args).stdout).unwrap().trim().to_string()
}

const UBAR: &str = r#"{"p":5,"w":1,"trunc":7,"coeffs":[0,1,0,0,0,1,1]}"#;

fn cyclotomic(p: u64, prec: u32, trunc: usize) -> String {
    let mut c = vec![0u64; p as usize + 2];
    let mut b = 1u64;
    for (k, slot) in c.iter_mut().enumerate().skip(1) {
        b = b * (p + 2 - k as u64) / k as u64;
        *slot = b;
    }
    serde_json::json!({ "p": p, "prec": prec, "trunc": trunc, "coeffs": c }).to_string()
}

#[test]
fn spec_examples() {
    assert_eq!(stdout(&["check", "m0", "--p", "5", "--e", "1", "--upper", "1,2,3"]), r#"{"m0":2}"#);
    assert_eq!(stdout(&["breaks", "upper", "--p", "5", "--lower", "4,24,124"]), r#"{"upper":[4,8,12]}"#);
    assert_eq!(stdout(&["series", "depth", "--series", UBAR]), r#"{"depth":4}"#);
}

#[test]
fn m0_from_document() {
    let doc = r#"{"p":5,"e":[1,1],"upper":[[1,1],[2,1],[3,1]],"contained_in_zp":true}"#;
    assert_eq!(stdout(&["check", "m0", "--input", doc]), r#"{"m0":2}"#);
    let bare = ok_json(&["check", "--input", doc]);
    assert_eq!(bare, ok_json(&["check", "main", "--input", doc]));
    assert_eq!(bare["all_pass"], true);
}

#[test]
fn exit_codes() {
    let bad = ramforge(&["breaks", "upper", "--p", "5", "--lower", "4,23"]);
    assert_eq!(bad.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(err["reason"], "sen_violation");

    let x = r#"{"p":5,"w":1,"trunc":7,"coeffs":[0,1]}"#;
    let short = ramforge(&["series", "depth", "--series", x]);
    assert_eq!(short.status.code(), Some(3));

    let u = cyclotomic(5, 8, 130);
    let q2 = ramforge(&["dynamics", "qn", "--series", &u, "--n", "2"]);
    assert_eq!(q2.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&q2.stderr).unwrap();
    assert_eq!(err["reason"], "precision");

    assert_eq!(ramforge(&["series", "depth", "--series", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(ramforge(&["series", "depth", "--series", "{not json"]).status.code(), Some(2));
    assert_eq!(ramforge(&["check", "frobnicate"]).status.code(), Some(2));
}

#[test]
fn precision_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ramforge"))
        .args(["series", "depth", "--series", UBAR])
        .env("RAMFORGE_MAX_PRECISION", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["reason"], "precision_cap");
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ramforge"))
        .args(["series", "depth", "--series", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(UBAR.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), r#"{"depth":4}"#);
}

#[test]
fn emitted_documents_are_readable() {
    let composed = stdout(&["series", "compose", "--outer", UBAR, "--inner", UBAR]);
    assert_eq!(stdout(&["series", "depth", "--series", &composed]), r#"{"depth":4}"#);
    let inv = stdout(&["series", "inverse", "--series", UBAR]);
    let back = stdout(&["series", "compose", "--outer", UBAR, "--inner", &inv]);
    let x: Value = serde_json::from_str(&back).unwrap();
    assert_eq!(x["coeffs"], serde_json::json!([0, 1, 0, 0, 0, 0, 0]));

    let psi = stdout(&["herbrand", "psi", "--p", "5", "--e", "1", "--upper", "1,2,3"]);
    let phi = stdout(&["herbrand", "phi", "--p", "5", "--e", "1", "--upper", "1,2,3"]);
    let id = ok_json(&["herbrand", "compose", "--outer", &phi, "--inner", &psi]);
    assert_eq!(id["slopes"], serde_json::json!(["1"]));
    let pts = ok_json(&["herbrand", "eval", "--func", &psi, "--x", "2,7/2"]);
    assert_eq!(pts["points"][0]["value"], "6");
    assert_eq!(pts["points"][1]["value"], "187/2");

    let bd = r#"{"p":5,"e":[1,1],"upper":[[1,1],[2,1],[3,1]]}"#;
    let verdict = ok_json(&["breaks", "validate", "--breaks", bd]);
    assert_eq!(verdict["valid"], true);

    let u = cyclotomic(5, 8, 130);
    let q1 = stdout(&["dynamics", "qn", "--series", &u, "--n", "1"]);
    let np = ok_json(&["dynamics", "newton", "--series", &q1, "--degree", "20"]);
    assert_eq!(np["segments"][0]["root_valuation"], "1/20");
}

#[test]
fn truncation_commands() {
    let obj = |e: usize| format!(r#"{{"p":5,"w":1,"e":{e}}}"#);
    let eta = |c: &str, t: usize| format!(r#"{{"p":5,"w":1,"trunc":{t},"coeffs":[{c}]}}"#);
    let f = format!(r#"{{"src":{},"dst":{},"r":2,"eta_coeff":{}}}"#, obj(3), obj(6), eta("1,1", 6));
    let f2 = format!(r#"{{"src":{},"dst":{},"r":2,"eta_coeff":{}}}"#, obj(3), obj(6), eta("1,1,0,0,1", 6));
    let g = format!(r#"{{"src":{},"dst":{},"r":1,"eta_coeff":{}}}"#, obj(6), obj(6), eta("2", 6));
    let ext = ok_json(&["trunc", "extension", "--morphism", &f]);
    assert_eq!(ext["extension"], true);
    assert_eq!(ext["isomorphism"], false);
    // eta differs at degree 4 = r c for c = 2
    assert_eq!(ok_json(&["trunc", "requiv", "--f", &f, "--g", &f2, "--c", "2"])["equivalent"], true);
    assert_eq!(ok_json(&["trunc", "requiv", "--f", &f, "--g", &f2, "--c", "3"])["equivalent"], false);
    let gf = stdout(&["trunc", "compose", "--g", &g, "--f", &f]);
    let gf2 = stdout(&["trunc", "compose", "--g", &g, "--f", &f2]);
    assert_eq!(ok_json(&["trunc", "requiv", "--f", &gf, "--g", &gf2, "--c", "2"])["equivalent"], true);
}

#[test]
fn check_reports() {
    let rep = ok_json(&["check", "main", "--p", "5", "--e", "1", "--upper", "1,2,3"]);
    assert_eq!(rep["all_pass"], true);
    assert_eq!(rep["m"], 2);
    let proot = ok_json(&["check", "proot", "--p", "7", "--e", "1", "--upper", "1,2,3,4"]);
    assert!(proot.get("guarantee").is_some());
    let f = ok_json(&["check", "fshift", "--p", "7", "--e", "3", "--m", "2"]);
    assert_eq!(f["holds"], true);
    let one = ok_json(&["check", "fshift", "--p", "5", "--e", "1", "--m", "1", "--t", "5"]);
    assert_eq!(one["f"], 24);
}

#[test]
fn dynamics_default_subcommand() {
    let u = cyclotomic(5, 8, 130);
    let rep = ok_json(&["dynamics", "--series", &u, "--levels", "2"]);
    assert_eq!(rep["depths"], serde_json::json!([4, 24, 124]));
    assert_eq!(rep["upper"], serde_json::json!([4, 8, 12]));
    assert_eq!(rep["index"]["d"]["finite"], 4);
    assert_eq!(rep["levels"][0]["weierstrass_degree"], 20);
    assert_eq!(rep["levels"][0]["newton"]["segments"][0]["root_valuation"], "1/20");
    let explicit = ok_json(&["dynamics", "analyze", "--series", &u, "--levels", "2"]);
    assert_eq!(rep, explicit);
}

#[test]
fn output_is_deterministic() {
    let u = cyclotomic(7, 4, 60);
    let a = ramforge(&["dynamics", "--series", &u, "--levels", "1"]).stdout;
    let b = ramforge(&["dynamics", "--series", &u, "--levels", "1"]).stdout;
    assert_eq!(a, b);
    let psi1 = ramforge(&["herbrand", "psi", "--p", "3", "--e", "2", "--upper", "1/2,3"]).stdout;
    let psi2 = ramforge(&["herbrand", "psi", "--p", "3", "--e", "2", "--upper", "1/2,3"]).stdout;
    assert_eq!(psi1, psi2);
}

#[test]
fn table_output() {
    let out = stdout(&["--format", "table", "series", "depth", "--series", UBAR]);
    assert_eq!(out, "depth  4");
}
