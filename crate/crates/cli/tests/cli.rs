use std::process::{Command, Output};

use maxkernel::matrixrep;
use serde_json::Value;

const ONE_MINUS_X: &str = r#"{"kind":"ppoly","breakpoints":[0,1],"coeffs":[[1,-1]],"real":true}"#;
const INDICATOR: &str = r#"{"kind":"step","breakpoints":[1],"values":[1],"real":true}"#;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_maxkernel"));
    c.args(args).env_remove("MAXKERNEL_THREADS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn config_of(text: &str) -> Value {
    let line = text.lines().next().unwrap();
    serde_json::from_str(line.strip_prefix("# config: ").expect("config header")).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn classify_one_minus_x() {
    let o = run(&["classify", "--symbol", ONE_MINUS_X, "--p", "1,0.4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("p=1e0: in (monotone_weighted_lp)"), "{text}");
    assert!(text.contains("p=4e-1: out ("), "{text}");
    let line = text.lines().find(|l| l.starts_with("p=1e0")).unwrap();
    let v: Value = serde_json::from_str(&line[line.find('{').unwrap()..]).unwrap();
    assert_eq!(v["verdict"], "in");
    assert!(v["norms"].is_object());
    assert_eq!(config_of(&text)["p"], serde_json::json!([1.0, 0.4]));
}

#[test]
fn classify_json_document() {
    let o = run(&["classify", "--symbol", INDICATOR, "--p", "0.5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdicts"][0]["result"]["verdict"], "in");
    assert_eq!(v["verdicts"][0]["result"]["criterion"], "finite_rank");
    assert_eq!(v["config"]["command"], "classify");
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(code(&run(&["classify", "--symbol", r#"{"kind":"ppoly","#])), 2);
    assert_eq!(code(&run(&["classify", "--symbol", "/nonexistent/symbol.json"])), 2);
    assert_eq!(code(&run(&["classify"])), 2);
    assert_eq!(code(&run(&["spectrum", "--method", "bogus", "--symbol", ONE_MINUS_X])), 2);
    assert_eq!(code(&run(&["sturm", "--symbol", INDICATOR])), 2);
    assert_eq!(code(&run(&["verify", "--only", "nosuch"])), 2);
    assert_eq!(code(&run_env(&["expdemo", "--N", "1"], &[("MAXKERNEL_THREADS", "0")])), 2);
}

#[test]
fn numeric_failure_exits_3() {
    let o = run(&["spectrum", "--symbol", ONE_MINUS_X, "--n", "2", "--tol", "1e-15", "--K", "2"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn step_exact_indicator_is_single_one() {
    let o = run(&["spectrum", "--method", "step_exact", "--symbol", INDICATOR]);
    assert_eq!(code(&o), 0);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(r[0][2], "step_exact");
}

#[test]
fn sturm_first_eigenvalue() {
    let o = run(&["spectrum", "--method", "sturm", "--symbol", ONE_MINUS_X, "--K", "5"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap() == "n,s_n,method,level");
    let r = rows(&text);
    assert_eq!(r.len(), 5);
    assert!((r[0][1].parse::<f64>().unwrap() - 0.405285).abs() < 1e-6);
}

#[test]
fn sturm_eigenreport_json() {
    let o = run(&["sturm", "--symbol", ONE_MINUS_X, "--K", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let e = &v["eigenvalues"][1];
    for key in ["n", "omega", "lambda", "residual"] {
        assert!(!e[key].is_null(), "{key}");
    }
    assert_eq!(e["n"], 1);
}

#[test]
fn compare_mode_reports_deviation() {
    let o = run(&["sturm", "--symbol", ONE_MINUS_X, "--K", "3", "--compare", "--n", "512"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("n,sturm,galerkin,rel_dev"));
    let dev: f64 = text.lines().last().unwrap().strip_prefix("# max_rel_dev: ").unwrap().parse().unwrap();
    assert!(dev < 1e-4);
}

#[test]
fn exp_method_gives_exact_values() {
    let o = run(&["spectrum", "--method", "exp", "--N", "16", "--K", "20"]);
    assert_eq!(code(&o), 0);
    let want = matrixrep::exp_symbol_svals(16, 20).unwrap();
    let got: Vec<f64> = rows(&stdout(&o)).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(got, want.estimate.svals);
}

#[test]
fn galerkin_json_has_refinement_history() {
    let o = run(&["spectrum", "--symbol", ONE_MINUS_X, "--K", "4", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let h = v["spectrum"]["refinement_history"].as_array().unwrap();
    assert!(h.len() >= 2);
    assert_eq!(v["config"]["galerkin"]["n0"], 64);
}

#[test]
fn hankel_of_cosine() {
    let cos = r#"{"kind":"trig","period":1,"coeffs":[0,0.5,0,0.5,0],"periodic":true,"real":true}"#;
    let o = run(&["hankel", "--symbol", cos, "--n", "20", "--K", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(config_of(&text)["hankel"]["M"], 20);
    assert_eq!(rows(&text).len(), 3);
}

#[test]
fn expdemo_growth_table() {
    let o = run(&["expdemo", "--N", "4,16", "--p", "1"]);
    let text = stdout(&o);
    assert!(text.contains("\nN,p,norm,reference,ratio\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 2);
    let ratio: f64 = r[1][4].parse().unwrap();
    assert!((ratio - matrixrep::exp_symbol_schatten(16, 1.0) / 17f64.ln()).abs() < 1e-12);
}

#[test]
fn csv_is_bit_identical_across_runs() {
    let env = [("MAXKERNEL_THREADS", "2")];
    for args in [
        &["spectrum", "--symbol", ONE_MINUS_X, "--K", "8"][..],
        &["expdemo", "--N", "1,4,16"][..],
        &["sturm", "--symbol", ONE_MINUS_X, "--K", "6"][..],
    ] {
        let a = run_env(args, &env);
        let b = run_env(args, &env);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(config_of(&stdout(&a))["threads"], 2);
    }
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("maxkernel-cli-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let o = run(&["spectrum", "--method", "exp", "--N", "1", "--K", "3", "--out", p]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(config_of(&text)["out"], p);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn verify_only_trace_records_tol() {
    let o = run(&["verify", "--only", "trace", "--tol", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(config_of(&text)["tol"], 2.0);
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("PASS [ 2] trace"));
}

#[test]
fn verify_failure_exits_1() {
    let o = run(&["verify", "--only", "trace", "--tol", "1e-30", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_pass"], false);
}
