use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::{Command, Output};

fn robin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robin")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("robin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn ball_file() -> String {
    scratch("ball.json", r#"{"kind":"ball","n":2}"#).to_string_lossy().into_owned()
}

#[test]
fn green_single_pole() {
    let ball = ball_file();
    let out = robin(&["green", "--domain", &ball, "--grid", "16", "--pole", "0,0,0,0"]);
    let v = stdout_json(&out);
    assert!((v["lambda"].as_f64().unwrap() + 1.0).abs() < 1e-8);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["grid", "iterations", "lambda", "min_g", "pole", "residual"]);
    // Floats carry 17 significant digits.
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"lambda\"")).unwrap();
    assert!(line.contains('e'), "{line}");
}

#[test]
fn green_lattice_csv_is_deterministic() {
    let ball = ball_file();
    let args = ["green", "--domain", &ball, "--grid", "20", "--lattice", "0,0,0,0;0,0,0.2,0", "--format", "csv"];
    let a = robin(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,x4,Lambda"));
    assert_eq!(lines.count(), 2);
    assert_eq!(robin(&args).stdout, a.stdout);
}

#[test]
fn green_errors_map_to_exit_codes() {
    let ball = ball_file();
    assert_eq!(robin(&["green", "--domain", "/nonexistent.json", "--pole", "0,0,0,0"]).status.code(), Some(2));
    assert_eq!(robin(&["green", "--domain", &ball, "--grid", "16", "--pole", "0,0,2,0"]).status.code(), Some(2));
    assert_eq!(robin(&["green", "--domain", &ball, "--pole", "0,0,0,0", "--c", "-1"]).status.code(), Some(2));
    assert_eq!(robin(&["green", "--domain", &ball, "--pole", "0,0"]).status.code(), Some(2));
    assert_eq!(robin(&["no-such-command"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_robin"))
        .args(["lie", "hopf", "--n", "2"])
        .env("ROBIN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn lie_closure_and_hopf() {
    let gens = scratch("gens.json", r#"[[[0,0,0],[1,0,0],[0,0,0]]]"#);
    let v = stdout_json(&robin(&["lie", "closure", "--n", "3", "--gens", gens.to_str().unwrap()]));
    assert_eq!(v, json!({"composition": [2, 1], "dim": 7}));
    let v = stdout_json(&robin(&["lie", "closure", "--n", "3"]));
    assert_eq!(v, json!({"composition": [1, 1, 1], "dim": 6}));
    let hopf = robin(&["lie", "hopf", "--n", "2"]);
    assert_eq!(hopf.status.code(), Some(0));
}

#[test]
fn lie_tangent() {
    let x = scratch("x.json", r#"[[0,0,0],[2,0,0],[3,5,0]]"#);
    let v = stdout_json(&robin(&["lie", "tangent", "--n", "3", "--matrix", x.to_str().unwrap()]));
    assert_eq!(v["tangent"].as_array().unwrap().len(), 3);
    let bad = scratch("bad.json", r#"[[1,2],[3,4]]"#);
    assert_eq!(robin(&["lie", "tangent", "--n", "3", "--matrix", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn torus_commands() {
    let v = stdout_json(&robin(&["torus", "from-tuple", "1", "1", "0", "1", "1", "1"]));
    assert_eq!(v["tuple"], json!([1, 1, 0, 1, 1, 1]));
    assert_eq!(v["jacobian"], json!("num:[1];den:[1]"));
    assert_eq!(v["marked_points_on_plane"], json!(true));
    let v = stdout_json(&robin(&["torus", "classify", "--a", "num:[1];den:[2]", "--b", "num:[0];den:[1]"]));
    assert_eq!((v["case"].clone(), v["p"].clone(), v["q"].clone()), (json!("b_zero_rational"), json!(2), json!(1)));
    let v = stdout_json(&robin(&["torus", "foliation", "1", "1", "0", "1", "1", "1", "--t", "1/3", "--t2", "4/3"]));
    assert_eq!(v["same_leaf"], json!(true));
    assert_eq!(robin(&["torus", "from-tuple", "1", "0", "0", "1", "1", "1"]).status.code(), Some(2));
}

#[test]
fn levi_euclidean() {
    let fam = scratch("tr.json", r#"{"kind":"translation","n":2,"direction":[1,0,0,0]}"#);
    let v = stdout_json(&robin(&["levi", "--family", fam.to_str().unwrap(), "--point", "1,0,0,0"]));
    assert_eq!(v["W"], json!(0.0));
    assert!((v["k2"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn out_file_and_selftest() {
    let target = std::env::temp_dir().join(format!("robin-cli-{}", std::process::id())).join("closure.json");
    std::fs::create_dir_all(target.parent().unwrap()).unwrap();
    let out = robin(&["lie", "closure", "--n", "2", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["dim"], json!(3));

    let st = robin(&["selftest", "--only", "7"]);
    assert_eq!(st.status.code(), Some(0));
    assert!(String::from_utf8(st.stdout).unwrap().starts_with("PASS  7 "));
}
