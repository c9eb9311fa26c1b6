use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn conecalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conecalc"))
        .args(args)
        .env_remove("CONECALC_CACHE")
        .output()
        .expect("binary runs")
}

fn spec(name: &str) -> String {
    specs().join(name).to_string_lossy().into_owned()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn zero_on_weight_line_is_not_elliptic() {
    let o = conecalc(&["analyze", "--spec", &spec("euler.json"), "--gamma", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = conecalc(&["analyze", "--spec", &spec("euler.json"), "--gamma", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn resonant_log_term_in_json() {
    let o = conecalc(&["asymptotics", "--spec", &spec("resonant.json"), "--order", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let terms = v["terms"].as_array().unwrap();
    let log = terms.iter().find(|t| t["k"] == 1).expect("log term");
    assert_eq!(log["p_re"], 0.5);
    assert!((log["c"][0]["re"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!(log["c"][0]["im"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn table_shows_both_conventions() {
    let o = conecalc(&["asymptotics", "--spec", &spec("resonant.json")]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("r^(-p): p") && s.contains("plain exponent -p"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["asymptotics", "--format", "json", "--spec"],
        vec!["parametrix", "--format", "json", "--spec"],
    ] {
        let mut a = args.clone();
        let s = spec("coulomb.json");
        a.push(&s);
        let x = conecalc(&a);
        let y = conecalc(&a);
        assert_eq!(x.status.code(), Some(0));
        assert_eq!(x.stdout, y.stdout);
    }
}

#[test]
fn schema_and_model_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"model":{"name":"euler_ode"},"weight":{"gamma":0.25},"surprise":1}"#).unwrap();
    let o = conecalc(&["analyze", "--spec", bad.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["error"]["kind"], "schema");
    fs::write(&bad, r#"{"model":{"name":"torus"},"weight":{"gamma":0.25}}"#).unwrap();
    let o = conecalc(&["analyze", "--spec", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let o = conecalc(&["analyze"]);
    assert_eq!(o.status.code(), Some(3));
    let o = conecalc(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn cache_hit_miss_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["parametrix", "--spec", &spec("euler.json"), "--format", "json", "--cache-dir", d];
    let first = conecalc(&args);
    assert!(String::from_utf8_lossy(&first.stderr).contains("cache miss"));
    let second = conecalc(&args);
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));
    assert_eq!(first.stdout, second.stdout);

    let entries: Vec<_> = fs::read_dir(d).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    assert!(entries[0].extension().is_some_and(|e| e == "json"));

    let mut other = args.to_vec();
    other.extend(["--gamma", "0.3"]);
    conecalc(&other);
    assert_eq!(fs::read_dir(d).unwrap().count(), 2);

    let text = fs::read_to_string(&entries[0]).unwrap();
    fs::write(&entries[0], &text[..text.len() / 2]).unwrap();
    let third = conecalc(&args);
    let err = String::from_utf8_lossy(&third.stderr);
    assert!(err.contains("warning") && err.contains("recomputing"), "{err}");
    assert_eq!(third.stdout, first.stdout);
    let fourth = conecalc(&args);
    assert!(String::from_utf8_lossy(&fourth.stderr).contains("cache hit"));
}

#[test]
fn cache_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_conecalc"));
        c.args(["parametrix", "--spec", &spec("euler.json")]).args(extra).env("CONECALC_CACHE", env_dir.path());
        c.output().unwrap()
    };
    run(&[]);
    assert_eq!(fs::read_dir(env_dir.path()).unwrap().count(), 1);
    run(&["--cache-dir", flag_dir.path().to_str().unwrap()]);
    assert_eq!(fs::read_dir(flag_dir.path()).unwrap().count(), 1);
    assert_eq!(fs::read_dir(env_dir.path()).unwrap().count(), 1);
}

#[test]
fn edge_commands_run() {
    let o = conecalc(&["edge-analyze", "--spec", &spec("edge_r3.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["pole_drift"], 0.0);
    let o = conecalc(&["edge-parametrix", "--spec", &spec("edge_r3.json"), "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = conecalc(&["edge-analyze", "--spec", &spec("edge_variable.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout_json(&o)["pole_drift"].as_f64().unwrap() > 0.1);
    let o = conecalc(&["edge-analyze", "--spec", &spec("euler.json")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_passes() {
    let o = conecalc(&["verify", "--seed", "7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    assert_eq!(v["suites"].as_array().unwrap().len(), 10);
    assert_eq!(v["passed"], true);
}
