use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn ex(name: &str) -> String {
    examples().join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degenform"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn half(side: u8, weights: &[u32]) -> String {
    let kind = if side == 1 { "rigid1" } else { "rigid2" };
    let total: u32 = weights.iter().sum();
    let halves: Vec<String> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| format!(r#"{{"label":{},"vertex":0,"weight":{w}}}"#, i + 1))
        .collect();
    format!(
        r#"{{"schema":"degenform/curve/v1","side":{side},"vertices":[{{"type":"{kind}","genus":0,"class":[{total}]}}],"edges":[],"half_edges":[{}]}}"#,
        halves.join(",")
    )
}

#[test]
fn enumerate_small_types() {
    let t = ex("t2.json");
    let o = run(&["enumerate", "--target", &t, "--beta", "1,1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("type g=0 n=0 beta=[1, 1]: 1 graphs, 1 edge-ordered graphs"));

    let o = run(&["enumerate", "--target", &t, "--beta", "0,0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(": 0 graphs, 0 edge-ordered graphs"));

    let o = run(&["enumerate", "--target", &t, "--beta", "2,2", "--format", "records"]);
    let last = stdout(&o).lines().last().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&last).unwrap();
    assert_eq!(v["graphs"], 3);
    assert_eq!(v["inverse_aut_sum"], "2/1");
}

#[test]
fn enumerate_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.json", r#"{"schema":"degenform/target/v1","class_rank":1}"#);
    assert_eq!(code(&run(&["enumerate", "--target", &bad, "--beta", "1"])), 2);
    let t = ex("t2.json");
    assert_eq!(code(&run(&["enumerate", "--target", &t, "--beta", "1"])), 2);
    assert_eq!(code(&run(&["enumerate", "--target", "/nonexistent.json", "--beta", "1"])), 2);
}

#[test]
fn split_reports() {
    let o = run(&["split", &ex("e1.json")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("1 splitting rays"));

    let o = run(&["split", &ex("e3.json"), "--format", "records"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["l"], "6");
    assert_eq!(v["lengths"], serde_json::json!(["3", "2"]));

    assert_eq!(code(&run(&["split", &ex("unbalanced.json")])), 2);
}

#[test]
fn glue_reports_lcm_and_degree() {
    let o = run(&["glue", &ex("half1.json"), &ex("half2.json"), "--format", "records"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["l"], "6");
    assert_eq!(v["gluing_degree"], "1/1");

    let dir = tempfile::tempdir().unwrap();
    let a = write(&dir, "a.json", &half(1, &[2, 2]));
    let b = write(&dir, "b.json", &half(2, &[2, 2]));
    let o = run(&["glue", &a, &b, "--format", "records"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["l"], "2");
    assert_eq!(v["gluing_degree"], "2/1");

    let c = write(&dir, "c.json", &half(2, &[2, 1]));
    let o = run(&["glue", &a, &c]);
    assert_eq!(code(&o), 2);
}

#[test]
fn evaluate_with_tables() {
    let t = ex("t2.json");
    let o = run(&["evaluate", "--target", &t, "--beta", "1,1", "--table", &ex("t2-constant-one.json")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("total: 1/1"));

    let dir = tempfile::tempdir().unwrap();
    let empty = write(&dir, "empty.json", r#"{"schema":"degenform/invariants/v1","records":[]}"#);
    let o = run(&["evaluate", "--target", &t, "--beta", "1,1", "--table", &empty]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("w1:1"));

    let zero = write(
        &dir,
        "zero.json",
        r#"{"schema":"degenform/invariants/v1","records":[
            {"component":1,"genus":0,"class":{"a1":1},"relative":[[1,"1"]],"value":"0"},
            {"component":2,"genus":0,"class":{"a2":1},"relative":[[1,"1"]],"value":"0"}]}"#,
    );
    let o = run(&["evaluate", "--target", &t, "--beta", "1,1", "--table", &zero]);
    assert!(stdout(&o).starts_with("total: 0/1"));

    let o = run(&["evaluate", "--target", &t, "--beta", "2,2", "--synthetic", "constant:1"]);
    assert!(stdout(&o).starts_with("total: 3/1"));
    let o = run(&["evaluate", "--target", &t, "--genus", "1", "--beta", "2,2", "--synthetic", "constant:1"]);
    assert!(stdout(&o).starts_with("total: 15/2"));
}

#[test]
fn evaluate_both_sides() {
    let t = ex("t2.json");
    let lhs = ex("lhs.json");
    let o = run(&["evaluate", "--target", &t, "--beta", "1,1", "--synthetic", "constant:1", "--both-sides", &lhs]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(agrees)"));
    let o = run(&["evaluate", "--target", &t, "--beta", "1,1", "--synthetic", "constant:2", "--both-sides", &lhs]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("DISAGREES"));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "--suite", "split-facet", "--size", "50"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("split-facet: pass"));
    assert_eq!(code(&run(&["verify", "--suite", "koszul"])), 0);
    assert_eq!(code(&run(&["verify", "--suite", "unknown"])), 2);
}

#[test]
fn jobs_flag_does_not_change_output() {
    let t = ex("t2-p1.json");
    let args = ["evaluate", "--target", &t, "--genus", "1", "--beta", "2,2", "--synthetic", "random:5"];
    let one = run(&[&args[..], &["--jobs", "1"]].concat());
    let four = run(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
}
