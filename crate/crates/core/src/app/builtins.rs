//! Built-in operators.

use crate::cone::{FuchsOperator, PrincipalSymbol, QuadraticSymbol, SpectralModel};
use crate::edge::{EdgeCoeff, EdgeDegenerateOperator, YPoly};
use crate::error::{Error, Result};
use crate::mero::linalg::{c64, zeros, CMatrix};
use serde_json::{Map, Value};

pub const BUILTINS: [&str; 5] = ["euler_ode", "cone_laplacian_s1", "cone_laplacian_s2", "coulomb_swave", "edge_laplacian_r3"];

#[derive(Clone, Debug)]
pub enum BuiltOperator {
    Cone(FuchsOperator),
    Edge(EdgeDegenerateOperator),
}

fn num(params: &Map<String, Value>, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v.as_f64().ok_or_else(|| Error::InvalidInput(format!("parameter {key:?} must be a number"))),
    }
}

fn count(params: &Map<String, Value>, key: &str, default: usize) -> Result<usize> {
    match params.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => v
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| Error::InvalidInput(format!("parameter {key:?} must be a non-negative integer"))),
    }
}

fn diag(values: &[f64]) -> CMatrix {
    let mut m = zeros(values.len(), values.len());
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = c64(*v, 0.0);
    }
    m
}

fn scalar(x: f64) -> CMatrix {
    CMatrix::from_element(1, 1, c64(x, 0.0))
}

/// Builds a named operator; `params` may override the defaults.
pub fn build_model(name: &str, params: &Map<String, Value>) -> Result<BuiltOperator> {
    match name {
        "euler_ode" => {
            let a: Vec<f64> = match params.get("a") {
                None => vec![-0.25, 0.0, 1.0],
                Some(v) => v
                    .as_array()
                    .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| Error::InvalidInput("parameter \"a\" must be a list of numbers".into()))?,
            };
            if a.len() < 2 || a.last() == Some(&0.0) {
                return Err(Error::InvalidInput("euler_ode needs a non-zero leading coefficient".into()));
            }
            let taylor = a.iter().map(|&x| vec![scalar(x)]).collect();
            Ok(BuiltOperator::Cone(FuchsOperator::new(a.len() - 1, SpectralModel::point("euler_ode"), taylor)?))
        }
        "cone_laplacian_s1" => {
            let k = count(params, "K", 8)? as i64;
            let modes: Vec<i64> = (-k..=k).collect();
            let labels = modes.iter().map(|m| format!("k={m}")).collect();
            let model = SpectralModel::with_labels("cone_laplacian_s1", 1, modes.len(), labels)?;
            let a0: Vec<f64> = modes.iter().map(|&m| -((m * m) as f64)).collect();
            let taylor = vec![vec![diag(&a0)], vec![zeros(modes.len(), modes.len())], vec![diag(&vec![1.0; modes.len()])]];
            let op = FuchsOperator::new(2, model, taylor)?
                .with_principal(PrincipalSymbol::Quadratic(QuadraticSymbol::laplace_like(0.0)));
            Ok(BuiltOperator::Cone(op))
        }
        "cone_laplacian_s2" => {
            let l = count(params, "L", 4)?;
            let labels = (0..=l).map(|m| format!("l={m}")).collect();
            let mut model = SpectralModel::with_labels("cone_laplacian_s2", 2, l + 1, labels)?;
            model.metadata.insert("degeneracy".into(), "mode l carries 2l+1 spherical harmonics".into());
            let a0: Vec<f64> = (0..=l).map(|m| -((m * (m + 1)) as f64)).collect();
            let taylor = vec![vec![diag(&a0)], vec![diag(&vec![-1.0; l + 1])], vec![diag(&vec![1.0; l + 1])]];
            let op = FuchsOperator::new(2, model, taylor)?
                .with_principal(PrincipalSymbol::Quadratic(QuadraticSymbol::laplace_like(0.0)));
            Ok(BuiltOperator::Cone(op))
        }
        "coulomb_swave" => {
            let z = num(params, "Z", 1.0)?;
            let e = num(params, "E", -z * z / 2.0)?;
            let mut model = SpectralModel::with_labels("coulomb_swave", 2, 1, vec!["l=0".into()])?;
            model.metadata.insert("operator".into(), format!("-1/2 Laplace - {z}/r - ({e})"));
            // r^{-2} ( -1/2 (D^2 - D) - Z r - E r^2 )
            let taylor = vec![vec![scalar(0.0), scalar(-z), scalar(-e)], vec![scalar(0.5)], vec![scalar(-0.5)]];
            let op = FuchsOperator::new(2, model, taylor)?.with_principal(PrincipalSymbol::Quadratic(QuadraticSymbol {
                radial: 0.5,
                cross: 0.5,
                edge: 0.0,
                r_scale: Vec::new(),
                y_scale: Vec::new(),
            }));
            Ok(BuiltOperator::Cone(op))
        }
        "edge_laplacian_r3" => {
            let k = count(params, "K", 4)? as i64;
            let modes: Vec<i64> = (-k..=k).collect();
            let n = modes.len();
            let labels = modes.iter().map(|m| format!("k={m}")).collect();
            let model = SpectralModel::with_labels("edge_laplacian_r3", 1, n, labels)?;
            let a0: Vec<f64> = modes.iter().map(|&m| -((m * m) as f64)).collect();
            let coeffs = vec![
                EdgeCoeff { j: 0, alpha: vec![0], i: 0, poly: YPoly::constant(1, diag(&a0)) },
                EdgeCoeff { j: 2, alpha: vec![0], i: 0, poly: YPoly::constant(1, diag(&vec![1.0; n])) },
                EdgeCoeff { j: 0, alpha: vec![2], i: 0, poly: YPoly::constant(1, diag(&vec![-1.0; n])) },
            ];
            let op = EdgeDegenerateOperator::new(2, 1, model, coeffs)?
                .with_principal(PrincipalSymbol::Quadratic(QuadraticSymbol::laplace_like(1.0)));
            Ok(BuiltOperator::Edge(op))
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::polyeig;

    fn cone(name: &str, params: Value) -> FuchsOperator {
        match build_model(name, params.as_object().unwrap()).unwrap() {
            BuiltOperator::Cone(a) => a,
            BuiltOperator::Edge(_) => panic!("edge operator"),
        }
    }

    #[test]
    fn euler_default_symbol() {
        let a = cone("euler_ode", serde_json::json!({}));
        let h = a.level_symbol(0);
        assert_eq!(h.coeff(0)[(0, 0)], c64(-0.25, 0.0));
        assert_eq!(h.coeff(2)[(0, 0)], c64(1.0, 0.0));
    }

    #[test]
    fn s1_modes() {
        let a = cone("cone_laplacian_s1", serde_json::json!({"K": 8}));
        assert_eq!(a.size(), 17);
        assert_eq!(a.level_symbol(0).eval(c64(3.0, 0.0))[(0, 0)], c64(9.0 - 64.0, 0.0));
    }

    #[test]
    fn s2_roots() {
        let a = cone("cone_laplacian_s2", serde_json::json!({"L": 2}));
        let h = a.level_symbol(0).block(&[2]);
        let mut r: Vec<f64> = polyeig(&h).unwrap().iter().map(|r| r.value.re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] + 2.0).abs() < 1e-12 && (r[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn coulomb_indicial_roots() {
        let a = cone("coulomb_swave", serde_json::json!({"Z": 2}));
        let mut r: Vec<f64> = polyeig(&a.level_symbol(0)).unwrap().iter().map(|r| r.value.re).collect();
        r.sort_by(f64::total_cmp);
        assert!(r[0].abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12);
        assert_eq!(a.coeff(0, 2)[(0, 0)], c64(2.0, 0.0));
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(build_model("nope", &Map::new()), Err(Error::UnknownModel(_))));
    }
}
