use conecalc_wasm::{analyze, asymptotics, edge_analyze};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

const S1: &str = r#"{"model":{"name":"cone_laplacian_s1","K":2},"weight":{"gamma":0.5}}"#;
const RESONANT: &str = r#"{"model":{"name":"resonant","n":0,"K":1},
    "operator":{"mu":2,"taylor":[[[[-0.25]]],[[[0]]],[[[1]]]]},
    "weight":{"gamma":-0.5},
    "rhs":{"terms":[{"p_re":2.5,"p_im":0,"k":0,"c":[1]}]}}"#;

#[test]
fn analyze_reports_exponents() {
    let v = parse(&analyze(S1, f64::NAN));
    assert_eq!(v["exit"], 0);
    assert_eq!(v["result"]["conormal"]["zeros"].as_array().unwrap().len(), 5);
    let v = parse(&analyze(S1, 0.0));
    assert_eq!(v["exit"], 2);
}

#[test]
fn asymptotics_has_log_term() {
    let v = parse(&asymptotics(RESONANT, f64::NAN, 1));
    assert_eq!(v["exit"], 0);
    assert!(v["result"]["terms"].as_array().unwrap().iter().any(|t| t["k"] == 1));
}

#[test]
fn errors_are_json() {
    let v = parse(&analyze("{", f64::NAN));
    assert_eq!(v["error"]["kind"], "schema");
    let v = parse(&edge_analyze(S1, f64::NAN));
    assert_eq!(v["error"]["exit_code"], 3);
}

#[test]
fn edge_field() {
    let spec = r#"{"model":{"name":"edge_laplacian_r3","K":2},"weight":{"gamma":0.25},"edge":{"q":1}}"#;
    let v = parse(&edge_analyze(spec, f64::NAN));
    assert_eq!(v["exit"], 0);
    assert_eq!(v["result"]["pole_drift"], 0.0);
}
