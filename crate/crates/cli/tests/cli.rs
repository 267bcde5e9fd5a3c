use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubic-rings")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn verify_counted_instance() {
    let o = run(&["verify", "thm-overrings", "--case", "1r", "--m", "2", "--p", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("closed=10 oracle=10 diff=0"));
}

#[test]
fn overrings_of_a0_is_a() {
    for case in ["1r", "1u", "2r", "2u", "3"] {
        let o = run(&["overrings", "--case", case, "--m", "0"]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(json(&o).as_array().unwrap().len(), 1);
    }
}

#[test]
fn oracle_listing_matches_closed_form() {
    let closed = run(&["overrings", "--case", "2u", "--m", "2", "--p", "5"]);
    let oracle = run(&["overrings", "--case", "2u", "--m", "2", "--p", "5", "--oracle"]);
    assert_eq!(closed.stdout, oracle.stdout);
}

#[test]
fn excluded_three_branch_parameter_is_a_usage_error() {
    let o = run(&["mk-order", "--case", "3", "--kind", "c", "--l", "2", "--q", "0", "--a", "1,3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("a ≢ 1"));
    let ok = run(&["mk-order", "--case", "3", "--kind", "c", "--l", "2", "--q", "0", "--a", "2,3"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["overrings", "--case", "5r", "--m", "1"]).status.code(), Some(2));
    assert_eq!(run(&["overrings", "--case", "1r", "--m", "1", "--p", "4"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "no-such-check"]).status.code(), Some(2));
    assert_eq!(run(&["overrings", "--case", "1r", "--m", "1", "--p", "11", "--oracle"]).status.code(), Some(3));
    assert_eq!(run(&["overrings", "--case", "1r", "--m", "4", "--p", "5", "--oracle"]).status.code(), Some(3));
}

#[test]
fn classify_plane_curve_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c2.json");
    let path = path.to_str().unwrap();
    let o = run(&["mk-order", "--case", "1r", "--kind", "c", "--rho", "2", "--a", "3", "--out", path]);
    assert_eq!(o.status.code(), Some(0));
    let c = run(&["classify", "--order", &format!("@{path}")]);
    assert_eq!(c.status.code(), Some(0));
    let v = json(&c);
    assert_eq!(v["edim"], 2);
    assert_eq!(v["local"], true);
    assert_eq!(v["type"]["name"], "E_6");
    assert_eq!(v["type"]["vy"], serde_json::json!([4]));
    assert_eq!(v["param_count"], 1);
}

#[test]
fn classify_decomposable_has_no_type() {
    let o = run(&["classify", "--order", r#"{"case":"3","kind":"ShiftedC","k":0,"l":0,"q":1,"a":[]}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["decomposable"], true);
    assert!(v.get("type").is_none());
    assert!(v.get("edim").is_none());
}

#[test]
fn dual_has_witness() {
    let o = run(&["dual", "--order", r#"{"case":"2r","kind":"ShiftedC","k":1,"rho":1,"a":[2]}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["closed_form"].is_object());
    assert!(v["witness"].is_object());
}

#[test]
fn ideal_census_csv() {
    let o = run(&["ideal-classes", "--order", r#"{"case":"1r","kind":"Am","m":1}"#, "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    assert!(!text.contains("UNEXPECTED"));
}

#[test]
fn ideal_census_window_below_conductor_is_rejected() {
    let o = run(&["ideal-classes", "--order", r#"{"case":"1r","kind":"Am","m":2}"#, "--window", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["overrings", "--case", "3", "--m", "2", "--p", "7"]);
    let b = run(&["overrings", "--case", "3", "--m", "2", "--p", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let x = run(&["verify", "foundations", "--case", "2r", "--seed", "9"]);
    let y = run(&["verify", "foundations", "--case", "2r", "--seed", "9"]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn par_estimate_constant_for_a1() {
    let o = run(&["par-estimate", "--family", r#"{"case":"2r","kind":"Am","m":1}"#, "--primes", "5,7,11"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["degree"], 0);
}
