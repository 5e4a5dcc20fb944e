use std::io::Write;
use std::process::{Command, Stdio};

use sphere_taming::fixtures;
use sphere_taming::format::emit;

fn run(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sphere-taming"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn validate_reports_counts() {
    let (code, out, _) = run(&["validate"], &emit(&fixtures::eh2(), None));
    assert_eq!(code, 0);
    assert!(out.starts_with("valid: 4 points, 4 separatrices"));
}

#[test]
fn invalid_and_malformed_input_exit_2() {
    let (code, out, _) = run(&["validate"], "foliation v1\npoint p1 elliptic +\nsep m1 p1 q1\n");
    assert_eq!(code, 2);
    assert!(out.contains("unknown point q1"));
    let (code, _, err) = run(&["decide"], "foliation v1\npoint p1 blob +\n");
    assert_eq!(code, 2);
    assert!(err.contains("line 2, column 10"));
}

#[test]
fn decide_exit_codes() {
    let (code, out, _) = run(&["decide"], &emit(&fixtures::loop_plus(), None));
    assert_eq!(code, 1);
    assert!(out.starts_with("# verdict overtwisted\n# polygon "));
    let (code, out, _) = run(&["decide"], &emit(&fixtures::negh(), None));
    assert_eq!(code, 0);
    assert_eq!(out.matches("\nvalue ").count(), 4);
}

#[test]
fn tame_output_verifies() {
    let (code, doc, _) = run(&["tame"], &emit(&fixtures::eh2(), None));
    assert_eq!(code, 0);
    let (code, out, _) = run(&["verify"], &doc);
    assert_eq!((code, out.as_str()), (0, "verified\n"));
    let broken = doc.replace("value h1 1/2", "value h1 2/1");
    let (code, out, _) = run(&["verify"], &broken);
    assert_eq!((code, out.as_str()), (1, "not verified\n"));
}

#[test]
fn extend_lists_attachments() {
    let (code, out, _) = run(&["extend"], &emit(&fixtures::std(), None));
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
    let (code, _, _) = run(&["extend"], &emit(&fixtures::loop_plus(), None));
    assert_eq!(code, 2);
}

#[test]
fn enumerate_and_render() {
    let (code, out, _) = run(&["enumerate", "--max-saddles", "1"], "");
    assert_eq!(code, 0);
    assert_eq!(out.matches("foliation v1").count(), 5);
    let (code, svg, _) = run(&["render", "--format", "svg"], &emit(&fixtures::loop_plus(), None));
    assert_eq!(code, 0);
    assert!(svg.contains("class=\"polygon positive\""));
    let (_, dot, _) = run(&["render"], &emit(&fixtures::eh2(), None));
    assert!(dot.starts_with("digraph foliation {"));
}

#[test]
fn json_is_stable() {
    let input = emit(&fixtures::chain3_bridged(), None);
    let a = run(&["decide", "--json"], &input);
    let b = run(&["decide", "--json"], &input);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(v["verdict"], "tight");
}
