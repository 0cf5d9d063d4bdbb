use std::path::PathBuf;
use std::process::{Command, Output};

use dot_parser::{ast, canonical};
use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    root().join("fixtures").join(format!("{name}.oct"))
}

fn ocrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ocrank")).args(args).output().expect("binary runs")
}

fn run(cmd: &str, name: &str, extra: &[&str]) -> (i32, String) {
    let path = fixture(name);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = ocrank(&args);
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("schemas/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).expect("schema compiles")
}

fn assert_valid(v: &Value) {
    let errors: Vec<String> = validator().iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{v:#}");
}

#[test]
fn rank_exit_codes() {
    let (code, out) = run("rank", "fig1", &[]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["bound"].as_str().unwrap().starts_with("w+"));
    assert_eq!(run("rank", "plus", &[]).0, 2);
    assert_eq!(run("rank", "concat2", &[]).0, 0);
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(ocrank(&[]).status.code(), Some(1));
    assert_eq!(ocrank(&["frobnicate", "x.oct"]).status.code(), Some(1));
    assert_eq!(ocrank(&["nsets", "/nonexistent.oct"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.oct");
    std::fs::write(&bad, "alphabet a\nstates q\nfinal q\n").unwrap();
    let out = ocrank(&["nsets", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    assert_eq!(ocrank(&["nsets", fixture("plus").to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn unknown_exits_three() {
    // members are "aa" (input 01) and "abba" (input 0011); with input cap 2
    // only powers of a are seen, yet the over-approximation leaves a*
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("m.oct"),
        "alphabet a b\nstates p q r t u\ninitial p\nfinal r\ntrans p 0 q a\ntrans q 1 r a\ntrans q 0 t b\ntrans t 1 u b\ntrans u 1 r a\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("e.oct"), "expr plus m\n").unwrap();
    let e = dir.path().join("e.oct");
    let out = ocrank(&["rank", e.to_str().unwrap(), "--input-cap", "2", "--output-cap", "4"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn nsets_table_for_fig1() {
    let (code, out) = run("nsets", "fig1", &[]);
    assert_eq!(code, 0);
    assert!(out.contains("P=2"));
    assert!(out.lines().next().unwrap().starts_with("q0\tN-: {t}"));
}

#[test]
fn enumerate_streams_in_order() {
    let (code, out) = run("enumerate", "fig1", &["--input-cap", "4", "--output-cap", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().collect::<Vec<_>>(), ["ca", "cba", "cbba", "ccaa"]);
}

#[test]
fn check_passes_on_fixtures() {
    for name in ["fig1", "fig2"] {
        let (code, out) = run("check", name, &[]);
        assert_eq!(code, 0, "{out}");
        assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
    }
}

#[test]
fn reports_validate_against_schema() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, name) in [
        ("nsets", "fig1"),
        ("nsets", "fig2"),
        ("mprime", "fig1"),
        ("mprime", "fig2"),
        ("rank", "fig1"),
        ("rank", "fig2"),
        ("rank", "concat3"),
        ("rank", "plus"),
    ] {
        let path = dir.path().join(format!("{cmd}-{name}.json"));
        let (code, _) = run(cmd, name, &["--json", path.to_str().unwrap()]);
        assert!(code == 0 || code == 2, "{cmd} {name}");
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_valid(&v);
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let v = validator();
    assert!(!v.is_valid(&serde_json::json!({ "nsets": [], "period": 0, "types": {} })));
    assert!(!v.is_valid(&serde_json::json!({ "bound": "w*w", "status": "certified", "derivation": [], "witness": null })));
}

#[test]
fn reports_are_deterministic() {
    for cmd in ["nsets", "mprime", "rank"] {
        assert_eq!(run(cmd, "fig2", &[]), run(cmd, "fig2", &[]), "{cmd}");
    }
}

fn parse_dot(text: &str) -> (usize, usize) {
    let g = canonical::Graph::from(ast::Graph::try_from(text).unwrap_or_else(|e| panic!("invalid DOT: {e}\n{text}")));
    (g.nodes.set.len(), g.edges.set.len())
}

#[test]
fn dot_is_well_formed() {
    let (_, text) = run("dot", "fig2", &[]);
    assert_eq!(parse_dot(&text), (9, 11));
    let (_, text) = run("dot", "fig1", &[]);
    assert_eq!(parse_dot(&text), (2, 3));
    let (_, json) = run("mprime", "fig2", &[]);
    let v: Value = serde_json::from_str(&json).unwrap();
    let states = v["mprime"]["states"].as_array().unwrap().len();
    let transitions = v["mprime"]["transitions"].as_array().unwrap().len();
    let (_, text) = run("dot", "fig2", &["--prime"]);
    assert_eq!(parse_dot(&text), (states, transitions));
}
