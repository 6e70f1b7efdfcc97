use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn ucycle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucycle")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn spec_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn homology(text: &str, extra: &[&str]) -> Output {
    let f = spec_file(text);
    let path = f.path().to_str().unwrap().to_string();
    let mut args = vec!["homology", "--spec", &path];
    args.extend_from_slice(extra);
    ucycle(&args)
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn circle_table() {
    let o = homology(r#"{"b1": 1, "xi": [2], "ring": "Z"}"#, &[]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("even       Z^2"), "{text}");
}

#[test]
fn circle_json() {
    let o = homology(r#"{"b1": 1, "xi": [2], "ring": "Z"}"#, &["--json", "--parity", "even", "--e2"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["N"], 2);
    let h = &v["homology"][0];
    assert_eq!(h["part"], "even");
    assert_eq!(h["group"]["free_rank"], 2);
    assert_eq!(h["t_nilpotency"], 1);
    assert_eq!(v["e2"].as_array().unwrap().len(), 2);
}

#[test]
fn odd_part_of_the_cokernel_spec() {
    let o =
        homology(r#"{"b1": 3, "xi": [1, 0, 0], "cup3": [[1, 2, 3, 1]], "ring": "Z"}"#, &["--parity", "odd", "--json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["homology"].as_array().unwrap().len(), 1);
    assert_eq!(v["homology"][0]["part"], "odd");
}

#[test]
fn schema_errors_exit_2() {
    for text in [
        r#"{"b1": 2, "xi": [0, 0], "ring": "Z"}"#,
        r#"{"b1": 2, "xi": [1], "ring": "Z"}"#,
        r#"{"b1": 3, "xi": [1, 0, 0], "cup3": [[3, 2, 1, 1]], "ring": "Z"}"#,
        r#"{"b1": 1, "xi": [1], "ring": "F"}"#,
        "not json",
    ] {
        let o = homology(text, &[]);
        assert_eq!(code(&o), 2, "{text}");
    }
    let o = homology(r#"{"b1": 2, "xi": [0, 0], "ring": "Z"}"#, &[]);
    assert!(String::from_utf8(o.stderr).unwrap().contains("non-torsion"));
    assert_eq!(code(&ucycle(&["homology", "--spec", "/nonexistent/spec.json"])), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&ucycle(&[])), 2);
    assert_eq!(code(&ucycle(&["frobnicate"])), 2);
    assert_eq!(code(&ucycle(&["verify", "no-such-check"])), 2);
    assert_eq!(code(&ucycle(&["verify", "theorem2", "--N", "x"])), 2);
    assert_eq!(code(&ucycle(&["verify", "pfh-translate", "--g", "1"])), 2);
}

#[test]
fn unstable_truncation_exits_3() {
    let o = homology(r#"{"b1": 3, "xi": [1, 0, 0], "cup3": [[1, 2, 3, 1]], "ring": "Z", "truncation_power": 1}"#, &[]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stderr).unwrap().contains("truncation instability"));
}

#[test]
fn theorem2_exit_codes() {
    assert_eq!(code(&ucycle(&["verify", "theorem2", "--N", "1", "--m", "1"])), 0);
    assert_eq!(code(&ucycle(&["verify", "theorem2", "--N", "2", "--m", "-3", "--i-max", "3"])), 0);
    assert_eq!(code(&ucycle(&["verify", "theorem2", "--N", "1", "--m", "0"])), 2);
}

#[test]
fn failing_checks_exit_1() {
    let args: Vec<&str> = "verify annihilation --b1 3 --N 2 --m 1 --exponent 1 --trials 0 --json".split(' ').collect();
    let o = ucycle(&args);
    assert_eq!(code(&o), 1);
    assert!(stdout_json(&o)["witness"].is_object());
    let o = ucycle(&["verify", "pfh-translate", "--d", "4", "--g", "1", "--N", "3"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&ucycle(&["verify", "pfh-translate", "--d", "2", "--g", "2"])), 2);
}

#[test]
fn other_checks_pass() {
    let f = spec_file(r#"{"b1": 2, "xi": [2, 4], "ring": "Zmod:2"}"#);
    let p = f.path().to_str().unwrap();
    assert_eq!(code(&ucycle(&["verify", "theorem1", "--spec", p])), 0);
    assert_eq!(code(&ucycle(&["verify", "lemma-torus", "--spec", p])), 0);
    assert_eq!(code(&ucycle(&["verify", "lemma-torus", "--b1", "4", "--N", "3", "--ring", "Q"])), 0);
    assert_eq!(code(&ucycle(&["verify", "pfh-translate", "--d", "3", "--g", "1", "--b1", "2", "--N", "3"])), 0);
}

#[test]
fn seeded_reports_are_byte_identical() {
    let args = ["verify", "annihilation", "--b1", "3", "--trials", "20", "--seed", "7", "--json"];
    let a = ucycle(&args);
    let b = ucycle(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["parameters"]["seed"], 7);
}
