//! End-to-end tests of the binary: exit codes, JSON payloads, and
//! byte-level determinism of seeded commands.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forest-trees"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn write_instance(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is one JSON document")
}

#[test]
fn count_reports_tau_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "one-edge.json",
        r#"{"parts":[2,2],"edges":[[[0,0],[1,0]]]}"#,
    );
    let output = run(&["count", &path]);
    assert_eq!(output.status.code(), Some(0));
    let payload = stdout_json(&output);
    assert_eq!(payload["tau"], "3");
    assert_eq!(payload["profile"], serde_json::json!([[1, 1], [1, 0], [0, 1]]));
    assert_eq!(payload["oracle"], serde_json::Value::Null);
}

#[test]
fn count_agrees_with_both_oracles() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "tripartite.json",
        r#"{"parts":[2,1,1],"edges":[[[0,0],[1,0]],[[0,1],[2,0]]]}"#,
    );
    for oracle in ["kirchhoff", "enumerate"] {
        let output = run(&["count", &path, "--oracle", oracle]);
        assert_eq!(output.status.code(), Some(0), "oracle {oracle}");
        let payload = stdout_json(&output);
        assert_eq!(payload["oracle"]["match"], true);
        assert_eq!(payload["oracle"]["tau"], payload["tau"]);
    }
}

#[test]
fn count_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = write_instance(dir.path(), "malformed.json", "{not json");
    assert_eq!(run(&["count", &malformed]).status.code(), Some(1));

    let cyclic = write_instance(
        dir.path(),
        "cyclic.json",
        r#"{"parts":[2,2],"edges":[[[0,0],[1,0]],[[1,0],[0,1]],[[0,1],[1,1]],[[1,1],[0,0]]]}"#,
    );
    let output = run(&["count", &cyclic]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("cycle"));

    let four_parts = write_instance(
        dir.path(),
        "four-parts.json",
        r#"{"parts":[1,1,1,1],"edges":[]}"#,
    );
    assert_eq!(run(&["count", &four_parts]).status.code(), Some(1));

    assert_eq!(run(&["count", "/no/such/file.json"]).status.code(), Some(1));
}

#[test]
fn phi_evaluates_known_points() {
    let one_pair = run(&["phi", "5", "7"]);
    assert_eq!(one_pair.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&one_pair.stdout).trim(), "\"1\"");

    let two_pairs = run(&["phi", "1", "2", "3", "4"]);
    assert_eq!(String::from_utf8_lossy(&two_pairs.stdout).trim(), "\"10\"");

    let rational = run(&["phi", "1/2", "2/3"]);
    assert_eq!(String::from_utf8_lossy(&rational.stdout).trim(), "\"1\"");
}

#[test]
fn phi_rejects_singular_and_malformed_points() {
    // X = Y = 0 violates the guards.
    assert_eq!(run(&["phi", "1", "-1", "-1", "1"]).status.code(), Some(1));
    // Odd coordinate count.
    assert_eq!(run(&["phi", "1", "2", "3"]).status.code(), Some(1));
    assert_eq!(run(&["phi"]).status.code(), Some(1));
    assert_eq!(run(&["phi", "x", "1"]).status.code(), Some(1));
    assert_eq!(run(&["phi", "1/0", "2"]).status.code(), Some(1));
}

#[test]
fn identities_exit_codes_follow_the_contract() {
    let ok = run(&[
        "identities", "--ids", "L22,R63", "--sizes", "1..3", "--trials", "4", "--seed", "11",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let payload = stdout_json(&ok);
    assert_eq!(payload["seed"], 11);
    assert_eq!(payload["reports"].as_array().unwrap().len(), 2);
    assert_eq!(payload["reports"][0]["fail"], 0);

    assert_eq!(
        run(&["identities", "--ids", "L99"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["identities", "--sizes", "nine..ten"]).status.code(),
        Some(1)
    );
    let none = run(&["identities", "--ids", "L21", "--trials", "0"]);
    assert_eq!(none.status.code(), Some(0));
    assert_eq!(stdout_json(&none)["reports"][0]["pass"], 0);
}

#[test]
fn conjecture_scan_writes_reports_and_repeats_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports.jsonl");
    let args = [
        "conjecture", "--max-n", "4", "--trials", "3", "--seed", "5",
        "--out", out.to_str().unwrap(),
    ];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    let payload = stdout_json(&first);
    assert_eq!(payload["violations"], 0);
    assert_eq!(payload["k_le_2"], payload["k_le_2_equality"]);
    let first_lines = fs::read_to_string(&out).unwrap();
    assert_eq!(
        first_lines.lines().count() as u64,
        payload["reports"].as_u64().unwrap()
    );

    let second = run(&args);
    assert_eq!(second.stdout, first.stdout);
    assert_eq!(fs::read_to_string(&out).unwrap(), first_lines);

    let unwritable = run(&[
        "conjecture", "--max-n", "3", "--trials", "1",
        "--out", "/no/such/dir/reports.jsonl",
    ]);
    assert_eq!(unwritable.status.code(), Some(1));
}

#[test]
fn selftest_lists_the_ten_checks() {
    let output = run(&["selftest", "--list"]);
    assert_eq!(output.status.code(), Some(0));
    let names = stdout_json(&output);
    assert_eq!(names.as_array().unwrap().len(), 10);
    assert!(names
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n == "closed-form-vs-matrix-tree"));
}

#[test]
fn thread_cap_env_var_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_instance(
        dir.path(),
        "k11.json",
        r#"{"parts":[1,1],"edges":[]}"#,
    );
    let ok = Command::new(env!("CARGO_BIN_EXE_forest-trees"))
        .args(["count", &path])
        .env("FOREST_TREES_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let bad = Command::new(env!("CARGO_BIN_EXE_forest-trees"))
        .args(["count", &path])
        .env("FOREST_TREES_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn unknown_arguments_exit_one() {
    assert_eq!(run(&["count"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["conjecture", "--max-n", "99"]).status.code(), Some(1));
}
