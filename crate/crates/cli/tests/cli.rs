use std::process::{Command, Output};

fn ncglue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncglue")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn normal_form_command() {
    let o = ncglue(&["nf", "--pres", "sphere.alg", "--expr", "f0 f0"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("p f1 f0 fm1 - p f1 fm1 + f0\n"));
    let o = ncglue(&["nf", "--pres", "disc_q.alg", "--expr", "x* x"]);
    assert!(stdout(&o).starts_with("q x x* + (1 - q)\n"), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    let o = ncglue(&["complete", "--pres", "counterexample2.alg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL] complete"));
    assert!(stdout(&o).contains("dim A 6, dim A_c 7"));
    let o = ncglue(&["nf", "--pres", "missing.alg", "--expr", "x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ncglue(&["confluence", "--pres", "sphere.alg", "-D", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn spectrum_table() {
    let o = ncglue(&["spectrum", "--rep", "sphere1", "--p", "0.5", "--q", "0.5", "--N", "8", "--csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row1: Vec<f64> = out.lines().nth(2).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row1[0], 1.0);
    assert!((row1[4] - 0.625).abs() < 1e-12);
}

#[test]
fn json_reports() {
    let o = ncglue(&["--json", "basis", "--pres", "disc_q.alg", "-D", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["details"]["words"].as_array().unwrap().len(), 6);
    let o = ncglue(&["--json", "complete", "--pres", "counterexample2.alg"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "fail");
}

#[test]
fn degree_bound_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_ncglue"))
        .args(["--json", "basis", "--pres", "sphere.alg"])
        .env("NCGLUE_DEGREE_BOUND", "3")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["details"]["words"].as_array().unwrap().len(), 16);
}
