use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fracvar::functional::eval_composition;
use fracvar::io::{load_setup, load_trajectory};

const PRODUCT_PROBLEM: &str = r#"{"interval":[0,1],"terms":[{"alpha":0.5,"f":"v^2"},{"alpha":0.5,"f":"t^(1/2)*v"}],"H":"z1*z2","boundary":{"left":0,"right":1},"sense":"minimize"}"#;

fn fracvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracvar")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn value_after(text: &str, prefix: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(prefix))
        .unwrap_or_else(|| panic!("no line starting with {prefix:?} in\n{text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn eval_prints_functionals_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", PRODUCT_PROBLEM);
    let traj = write(dir.path(), "x.json", r#"{"base":0,"terms":[[1,0.5]]}"#);
    let out = fracvar(&["eval", "--problem", problem.to_str().unwrap(), "--trajectory", traj.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("L = 0.546669323"), "{text}");
    assert!(text.contains("F1 = 0.785398163"), "{text}");
    let csv = fs::read_to_string(dir.path().join("eval.csv")).unwrap();
    assert!(csv.starts_with("t,x,frac_derivative_1,frac_derivative_2\n"));
    assert_eq!(csv.lines().count(), 1001);
}

#[test]
fn residual_on_csv_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", PRODUCT_PROBLEM);
    let traj = write(
        dir.path(),
        "x.csv",
        "base,coefficient,exponent\n0,1.5346243137552724,0.5\n0,-0.5346243137552725,1\n",
    );
    let out = fracvar(&[
        "residual", "--problem", problem.to_str().unwrap(), "--trajectory", traj.to_str().unwrap(),
        "--grid", "200", "--eps", "0.01", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(value_after(&stdout(&out), "sup |R| = ") <= 1e-6);
    let csv = fs::read_to_string(dir.path().join("residual.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,R,defect_term_1,defect_term_2");
    assert_eq!(lines.len(), 201);
    assert!(lines[200].starts_with("0.990000000,"), "{}", lines[200]);
}

#[test]
fn natural_defect_reported_for_free_end() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", &PRODUCT_PROBLEM.replace(r#","right":1"#, ""));
    let traj = write(dir.path(), "x.json", r#"{"base":0,"terms":[[1,0.5]]}"#);
    let out = fracvar(&["residual", "--problem", problem.to_str().unwrap(), "--trajectory", traj.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let d = value_after(&stdout(&out), "natural defect at b: ");
    assert!((d - 1.789_380).abs() <= 1e-5);
    assert!(!stdout(&out).contains("natural defect at a"));
}

#[test]
fn solve_writes_reproducible_files() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", PRODUCT_PROBLEM);
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = fracvar(&["solve", "--problem", problem.to_str().unwrap(), "--basis", "0.5,1", "--seed", "3", "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (stdout(&out), out_dir)
    };
    let (text, first) = run("a");
    let (again, second) = run("b");
    assert_eq!(text, again);
    assert_eq!(fs::read(first.join("result.json")).unwrap(), fs::read(second.join("result.json")).unwrap());
    assert!(text.contains("status: converged (candidate)"), "{text}");

    // re-reading the trajectory reproduces the printed L
    let printed = value_after(&text, "L = ");
    let setup = load_setup(&problem).unwrap();
    let x = load_trajectory(first.join("trajectory.csv")).unwrap();
    let l = eval_composition(&setup.problem, &x, &setup.quadrature).unwrap().objective;
    assert!((l - printed).abs() <= 1e-9, "{l} vs {printed}");

    let json: serde_json::Value = serde_json::from_slice(&fs::read(first.join("result.json")).unwrap()).unwrap();
    assert_eq!(json["label"], "candidate");
    assert_eq!(json["status"], "converged");
    assert_eq!(json["seed"], 3);
    assert!(json["residual"]["sup_norm"].as_f64().unwrap() <= 1e-4);
    assert!(first.join("residual.csv").exists());
}

#[test]
fn malformed_problem_exits_with_named_field() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "p.json", &PRODUCT_PROBLEM.replace("z1*z2", "z1*z2*z3"));
    let traj = write(dir.path(), "x.json", r#"{"base":0,"terms":[[1,0.5]]}"#);
    let out = fracvar(&["eval", "--problem", problem.to_str().unwrap(), "--trajectory", traj.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("problem file H") && err.contains("z3"), "{err}");

    let missing = fracvar(&["eval", "--problem", "/nonexistent.json", "--trajectory", traj.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn selftest_single_panel_fails_quadrature_row() {
    let out = fracvar(&["selftest", "--panels", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let row2 = text.lines().find(|l| l.contains(" 2 (dt)^alpha integral")).unwrap();
    assert!(row2.starts_with("[FAIL]"), "{row2}");
}

#[test]
fn selftest_default_fails_only_row_ten() {
    let out = fracvar(&["selftest"]);
    let text = stdout(&out);
    let failing: Vec<&str> = text.lines().filter(|l| l.starts_with("[FAIL]")).collect();
    assert_eq!(failing.len(), 1, "{text}");
    assert!(failing[0].contains("10 L1 convergence"));
    assert_eq!(out.status.code(), Some(1));
    assert!(text.contains("11 passed, 1 failed"));
}
