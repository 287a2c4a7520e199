//! End-to-end runs of the `qmod` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/a2ext.json")
}

fn qmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmod")).args(args).env_remove("QMOD_BUDGET").output().unwrap()
}

fn with_fixture(args: &[&str]) -> Output {
    let f = fixture();
    let mut all = vec!["--quiver", f.to_str().unwrap()];
    all.extend_from_slice(args);
    qmod(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn poincare_of_running_example() {
    let o = with_fixture(&["poincare", "--dim", "2:4,1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "L^4 + L^3 + L^2 + L + 1\n");
    let o = with_fixture(&["poincare", "--dim", "3:6,2"]);
    assert_eq!(stdout(&o), "L^6 + L^5 + L^4 + L^3 + L^2 + L + 1\n");
}

#[test]
fn hn_types_one_per_line() {
    let o = with_fixture(&["hn-types", "--dim", "2:4,1"]);
    assert_eq!(code(&o), 0);
    let mut lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    lines.sort();
    assert_eq!(lines, vec!["(1|1,0) > (1|3,1)", "(1|1,1) > (1|3,0)", "(1|2,0) > (1|2,1)"]);
}

#[test]
fn slope_needs_no_config() {
    let o = qmod(&["slope", "--dim", "1:0,0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "1/1\n");
}

#[test]
fn dims_codim_euler() {
    assert_eq!(stdout(&with_fixture(&["dims", "--dim", "2:4,1"])), "rep_q 4\nrep_full 24\nmoduli 4\n");
    assert_eq!(stdout(&with_fixture(&["codim", "--hn", "(1|2,0) > (1|2,1)"])), "1\n");
    assert_eq!(stdout(&with_fixture(&["euler", "--dim", "2:4,1"])), "-3\n");
    assert_eq!(stdout(&with_fixture(&["semistable", "--dim", "2:4,1"])), "true\n");
}

#[test]
fn motives_and_counts_agree() {
    let m = stdout(&with_fixture(&["motive", "rep-full", "--dim", "1:2,0"]));
    assert_eq!(m, "L^6 - L^4 - L^3 + L\n");
    assert_eq!(stdout(&with_fixture(&["count", "--prime", "2", "--dim", "1:2,0"])), "42\n");
    assert_eq!(stdout(&with_fixture(&["motive", "sst", "--dim", "1:4,0"])), "0\n");
}

#[test]
fn census_reports_matching_strata() {
    let o = with_fixture(&["census", "--prime", "2", "--dim", "2:3,1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with('(')).all(|l| l.ends_with("\tok")), "{text}");
}

#[test]
fn json_output_is_deterministic() {
    let args = ["motive", "sst", "--dim", "2:4,1", "--format", "json", "--seed", "5"];
    let a = with_fixture(&args);
    let b = with_fixture(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["dim"], "(2|4,1)");
    assert_eq!(v["over_pg"]["text"], "L^4 + L^3 + L^2 + L + 1");
    let p: serde_json::Value = serde_json::from_slice(&with_fixture(&["poincare", "--dim", "2:4,1", "--format", "json"]).stdout).unwrap();
    assert_eq!(p["poincare"]["0"], 1);
    assert_eq!(p["poincare"]["4"], 1);
    let s1 = with_fixture(&["si-eval", "--dim", "2:4,1", "--seed", "9"]);
    let s2 = with_fixture(&["si-eval", "--dim", "2:4,1", "--seed", "9"]);
    assert_eq!(code(&s1), 0);
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(code(&qmod(&["bogus"])), 1);
    assert_eq!(code(&qmod(&["poincare", "--dim", "2:4,1"])), 1);
    assert_eq!(code(&with_fixture(&["poincare", "--dim", "2:4"])), 1);
    // assumption: not a semistable type
    assert_eq!(code(&with_fixture(&["poincare", "--dim", "1:4,0"])), 2);
    // budget
    let o = Command::new(env!("CARGO_BIN_EXE_qmod"))
        .args(["--quiver", fixture().to_str().unwrap(), "count", "--prime", "2", "--dim", "2:4,1"])
        .env("QMOD_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
    assert_eq!(code(&qmod(&["--help"])), 0);
}

#[test]
fn schema_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(&dir, "bad.json", r#"{"quiver": {"vertices": ["1"]}, "extension": {"t": [1]}, "extra": 1}"#);
    assert_eq!(code(&qmod(&["--quiver", bad.to_str().unwrap(), "dims", "--dim", "1:1"])), 1);
    let shape = write_config(
        &dir,
        "shape.json",
        r#"{"quiver": {"vertices": ["1","2"], "arrows": [{"name":"m","source":"1","target":"2"}]},
            "extension": {"t": [3,1], "matrices": {"m": [[1,0]]}, "assume_rigid": true}}"#,
    );
    assert_eq!(code(&qmod(&["--quiver", shape.to_str().unwrap(), "dims", "--dim", "1:1,1"])), 1);
}

#[test]
fn rigidity_and_gamma_assumptions_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unasserted = write_config(
        &dir,
        "u.json",
        r#"{"quiver": {"vertices": ["1","2"], "arrows": [{"name":"m","source":"1","target":"2"}]},
            "extension": {"t": [3,1], "matrices": {"m": [[1,0,0]]}}}"#,
    );
    assert_eq!(code(&qmod(&["--quiver", unasserted.to_str().unwrap(), "hn-types", "--dim", "2:4,1"])), 2);
    let no_gamma = write_config(
        &dir,
        "g.json",
        r#"{"quiver": {"vertices": ["1","2"], "arrows": [{"name":"m","source":"1","target":"2"}]},
            "extension": {"t": [3,1], "assume_rigid": true}}"#,
    );
    assert_eq!(code(&qmod(&["--quiver", no_gamma.to_str().unwrap(), "semistable", "--dim", "2:4,1"])), 2);
}

#[test]
fn multi_arrow_motive_needs_a_source() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "k2.json",
        r#"{"quiver": {"vertices": ["1","2"], "arrows": [{"name":"a","source":"1","target":"2"},{"name":"b","source":"1","target":"2"}]},
            "extension": {"t": [1,0], "matrices": {"a": [], "b": []}, "assume_rigid": true}}"#,
    );
    let c = cfg.to_str().unwrap();
    assert_eq!(code(&qmod(&["--quiver", c, "motive", "rep-full", "--dim", "1:1,0"])), 3);
    let o = qmod(&["--quiver", c, "motive", "rep-full", "--dim", "1:1,0", "--interpolate"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "L - 1\n");
    let table = write_config(&dir, "table.json", r#"{"1:1,0": "L - 1"}"#);
    let o = qmod(&["--quiver", c, "--user-table", table.to_str().unwrap(), "motive", "rep-full", "--dim", "1:1,0"]);
    assert_eq!(stdout(&o), "L - 1\n");
    let o = qmod(&["--quiver", c, "--user-table", table.to_str().unwrap(), "motive", "rep-full", "--dim", "1:1,1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn check_suite_passes_on_fixture() {
    let o = with_fixture(&["check"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("ok ")));
}

#[test]
fn check_fails_on_false_rigidity_claim() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "nr.json",
        r#"{"quiver": {"vertices": ["1","2"], "arrows": [{"name":"m","source":"1","target":"2"}]},
            "extension": {"t": [1,1], "matrices": {"m": [[0]]}, "assume_rigid": true}}"#,
    );
    let o = qmod(&["--quiver", cfg.to_str().unwrap(), "check", "--dim", "1:1,1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("FAIL rigidity"));
}
