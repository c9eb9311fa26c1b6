//! Browser front end: three operations on a JSON problem spec, each returning JSON.

use conecalc::app::commands::{error_value, run, Options};
use conecalc::app::json::to_canonical;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(command: &str, spec: &str, opts: Options) -> String {
    let v = match run(command, Some(spec), &opts) {
        Ok(out) => json!({"exit": out.exit, "result": out.value, "table": out.table, "notes": out.notes}),
        Err(e) => {
            let mut v = error_value(&e);
            v["table"] = Value::String(format!("error: {e}"));
            v
        }
    };
    to_canonical(&v)
}

fn gamma(g: f64) -> Option<f64> {
    g.is_finite().then_some(g)
}

/// Ellipticity report and indicial exponents; `gamma = NaN` keeps the spec weight.
#[wasm_bindgen]
pub fn analyze(spec: &str, gamma_override: f64) -> String {
    respond("analyze", spec, Options { gamma: gamma(gamma_override), ..Default::default() })
}

/// Singular expansion of the solution of `A u = f` to depth `order`.
#[wasm_bindgen]
pub fn asymptotics(spec: &str, gamma_override: f64, order: u32) -> String {
    respond("asymptotics", spec, Options { gamma: gamma(gamma_override), order: Some(order as usize), ..Default::default() })
}

/// Pole field along the edge and ellipticity of an edge-degenerate operator.
#[wasm_bindgen]
pub fn edge_analyze(spec: &str, gamma_override: f64) -> String {
    respond("edge-analyze", spec, Options { gamma: gamma(gamma_override), ..Default::default() })
}
