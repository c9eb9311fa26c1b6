use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn validator(name: &str) -> jsonschema::Validator {
    let path = root().join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn check(name: &str, v: &Value) {
    let errors: Vec<String> = validator(name).iter_errors(v).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn run(args: &[&str], cache: &Path) -> (i32, Value) {
    let o = Command::new(env!("CARGO_BIN_EXE_conecalc"))
        .args(args)
        .args(["--format", "json", "--cache-dir"])
        .arg(cache)
        .env_remove("CONECALC_CACHE")
        .output()
        .unwrap();
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).unwrap())
}

fn spec(name: &str) -> String {
    root().join("specs").join(name).to_string_lossy().into_owned()
}

#[test]
fn shipped_specs_are_valid() {
    for entry in fs::read_dir(root().join("specs")).unwrap() {
        let path = entry.unwrap().path();
        let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        check("problem_spec", &v);
    }
}

#[test]
fn malformed_spec_is_rejected_by_schema() {
    let v: Value = serde_json::json!({"model": {"name": "euler_ode"}, "weight": {"gamma": 0.25}, "depht": 3});
    assert!(!validator("problem_spec").is_valid(&v));
    let v: Value = serde_json::json!({"model": {"name": "euler_ode"}});
    assert!(!validator("problem_spec").is_valid(&v));
}

#[test]
fn command_outputs_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path();

    let (code, v) = run(&["analyze", "--spec", &spec("cone_s1.json")], cache);
    assert_eq!(code, 0);
    check("analyze", &v);
    let (code, v) = run(&["analyze", "--spec", &spec("euler.json"), "--gamma", "0"], cache);
    assert_eq!(code, 2);
    check("analyze", &v);

    let (code, v) = run(&["parametrix", "--spec", &spec("coulomb.json")], cache);
    assert_eq!(code, 0);
    check("parametrix_output", &v);
    check("parametrix", &v["parametrix"]);

    for name in ["coulomb.json", "resonant.json"] {
        let (code, v) = run(&["asymptotics", "--spec", &spec(name)], cache);
        assert_eq!(code, 0);
        check("asymptotics", &v);
        check("asymptotic_type", &v["asymptotic_type"]);
        check("singular_expansion", &v["particular"]);
        check("singular_expansion", &serde_json::json!({"terms": v["terms"], "flat_order": v["flat_order"]}));
    }

    let (code, v) = run(&["edge-analyze", "--spec", &spec("edge_variable.json")], cache);
    assert_eq!(code, 0);
    check("edge_analyze", &v);
    let (code, v) = run(&["edge-parametrix", "--spec", &spec("edge_r3.json")], cache);
    assert_eq!(code, 0);
    check("edge_parametrix", &v);

    let (code, v) = run(&["verify", "--seed", "3"], cache);
    assert_eq!(code, 0);
    check("verify", &v);

    let (code, v) = run(&["analyze", "--spec", "missing.json"], cache);
    assert_eq!(code, 3);
    check("error", &v);
}
