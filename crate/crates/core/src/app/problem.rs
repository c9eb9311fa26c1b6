//! Problem specifications read from JSON.

use super::builtins::{build_model, BuiltOperator, BUILTINS};
use super::json::{parse_expansion, parse_matrix, parse_mero};
use crate::cone::{FuchsOperator, MellinTerm, SmoothingMellinPart, SpectralModel};
use crate::edge::{EdgeCoeff, EdgeDegenerateOperator, YPoly};
use crate::error::{Error, Result};
use crate::solver::SingularExpansion;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<usize>,
    /// `taylor[j][i]`: matrix multiplying `r^i (-r d_r)^j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taylor: Option<Value>,
    /// List of `{"j", "gamma_j", "symbol"}` with a meromorphic symbol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mellin_part: Option<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub q: usize,
    #[serde(default)]
    pub y_degree: usize,
    /// List of `{"j", "alpha", "i", "y_terms": [{"exp", "matrix"}]}`.
    #[serde(default)]
    pub coefficients: Vec<Value>,
    /// Grid of edge points for edge checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_grid: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub gamma: f64,
    /// `null` or absent: infinite weight interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub model: ModelSpec,
    #[serde(default)]
    pub operator: OperatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<EdgeSpec>,
    pub weight: WeightSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Value>,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub tolerances: Map<String, Value>,
}

fn default_depth() -> usize {
    4
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub operator: BuiltOperator,
    pub mellin: Option<SmoothingMellinPart>,
    pub rhs: SingularExpansion,
    pub gamma: f64,
    pub theta: f64,
    pub depth: usize,
}

impl Problem {
    pub fn cone(&self) -> Result<&FuchsOperator> {
        match &self.operator {
            BuiltOperator::Cone(a) => Ok(a),
            BuiltOperator::Edge(_) => Err(Error::InvalidInput("this command needs a cone operator; use an edge command".into())),
        }
    }

    pub fn edge(&self) -> Result<&EdgeDegenerateOperator> {
        match &self.operator {
            BuiltOperator::Edge(a) => Ok(a),
            BuiltOperator::Cone(_) => Err(Error::InvalidInput("this command needs an edge operator".into())),
        }
    }

    pub fn y_grid(&self) -> Vec<Vec<f64>> {
        let q = self.edge().map(|e| e.q).unwrap_or(1);
        self.spec
            .edge
            .as_ref()
            .and_then(|e| e.y_grid.clone())
            .unwrap_or_else(|| (0..11).map(|i| vec![-1.0 + 0.2 * i as f64; q]).collect())
    }
}

fn schema(e: impl std::fmt::Display) -> Error {
    Error::Schema(e.to_string())
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(schema)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("spec serializes")
    }

    fn params(&self) -> Map<String, Value> {
        let mut p = self.model.params.clone();
        for (k, v) in &self.operator.params {
            p.insert(k.clone(), v.clone());
        }
        if let Some(k) = self.model.k {
            p.entry("K").or_insert(Value::from(k));
        }
        p
    }

    fn model(&self, size: usize, n_default: usize) -> Result<SpectralModel> {
        let n = self.model.n.unwrap_or(n_default);
        if let Some(k) = self.model.k {
            if k != size {
                return Err(Error::Schema(format!("model K = {k} but operator matrices are {size}x{size}")));
            }
        }
        SpectralModel::new(self.model.name.clone(), n, size).map_err(schema)
    }

    fn user_cone(&self, taylor: &Value) -> Result<FuchsOperator> {
        let rows = taylor.as_array().ok_or_else(|| schema("operator.taylor must be an array"))?;
        let mut t = Vec::new();
        for row in rows {
            let row = row.as_array().ok_or_else(|| schema("operator.taylor rows must be arrays"))?;
            t.push(row.iter().map(parse_matrix).collect::<Result<Vec<_>>>()?);
        }
        let size = t.iter().flatten().next().map(|m| m.nrows()).ok_or_else(|| schema("operator.taylor is empty"))?;
        let mu = self.operator.mu.unwrap_or(t.len().saturating_sub(1));
        let model = self.model(size, if size == 1 { 0 } else { 1 })?;
        FuchsOperator::new(mu, model, t).map_err(schema)
    }

    fn user_edge(&self, e: &EdgeSpec) -> Result<EdgeDegenerateOperator> {
        let mut coeffs = Vec::new();
        let mut size = None;
        for c in &e.coefficients {
            let j = c.get("j").and_then(Value::as_u64).ok_or_else(|| schema("edge coefficient needs j"))? as usize;
            let i = c.get("i").and_then(Value::as_u64).unwrap_or(0) as usize;
            let alpha: Vec<u32> = match c.get("alpha") {
                None => vec![0; e.q],
                Some(a) => a
                    .as_array()
                    .and_then(|a| a.iter().map(|x| x.as_u64().map(|v| v as u32)).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| schema("alpha must be a list of integers"))?,
            };
            let mut terms = Vec::new();
            for t in c.get("y_terms").and_then(Value::as_array).ok_or_else(|| schema("edge coefficient needs y_terms"))? {
                let exp: Vec<u32> = match t.get("exp") {
                    None => vec![0; e.q],
                    Some(a) => a
                        .as_array()
                        .and_then(|a| a.iter().map(|x| x.as_u64().map(|v| v as u32)).collect::<Option<Vec<_>>>())
                        .ok_or_else(|| schema("exp must be a list of integers"))?,
                };
                if exp.iter().sum::<u32>() as usize > e.y_degree {
                    return Err(schema(format!("y-monomial {exp:?} exceeds y_degree {}", e.y_degree)));
                }
                let m = parse_matrix(t.get("matrix").ok_or_else(|| schema("y term needs a matrix"))?)?;
                size.get_or_insert(m.nrows());
                terms.push((exp, m));
            }
            let k = size.ok_or_else(|| schema("edge coefficient without terms"))?;
            coeffs.push(EdgeCoeff { j, alpha, i, poly: YPoly::new(e.q, k, terms).map_err(schema)? });
        }
        let k = size.ok_or_else(|| schema("edge.coefficients is empty"))?;
        let mu = self.operator.mu.unwrap_or_else(|| coeffs.iter().map(|c| c.j + c.alpha.iter().sum::<u32>() as usize).max().unwrap_or(0));
        EdgeDegenerateOperator::new(mu, e.q, self.model(k, 1)?, coeffs).map_err(schema)
    }

    /// Validates the spec and builds operator, Mellin part and right-hand side.
    pub fn build(&self) -> Result<Problem> {
        let theta = self.weight.theta.unwrap_or(f64::NEG_INFINITY);
        if !self.weight.gamma.is_finite() || !(theta <= 0.0) {
            return Err(schema("weight.gamma must be finite and weight.theta non-positive"));
        }
        let user_edge = self.edge.as_ref().filter(|e| !e.coefficients.is_empty());
        let operator = if let Some(t) = &self.operator.taylor {
            BuiltOperator::Cone(self.user_cone(t)?)
        } else if let Some(e) = user_edge {
            BuiltOperator::Edge(self.user_edge(e)?)
        } else {
            let name = self.operator.builtin.clone().unwrap_or_else(|| self.model.name.clone());
            if !BUILTINS.contains(&name.as_str()) {
                return Err(Error::UnknownModel(name));
            }
            build_model(&name, &self.params())?
        };
        let (size, n) = match &operator {
            BuiltOperator::Cone(a) => (a.size(), a.model.n),
            BuiltOperator::Edge(a) => (a.size(), a.model.n),
        };
        if let (Some(k), BuiltOperator::Cone(a)) = (self.model.k, &operator) {
            if self.operator.taylor.is_some() && k != a.size() {
                return Err(schema("model.K does not match the operator size"));
            }
        }
        let mellin = match &self.operator.mellin_part {
            None => None,
            Some(v) => {
                let mut terms = Vec::new();
                for t in v.as_array().ok_or_else(|| schema("mellin_part must be an array"))? {
                    let j = t.get("j").and_then(Value::as_u64).ok_or_else(|| schema("Mellin term needs j"))? as usize;
                    let gamma_j = t.get("gamma_j").and_then(Value::as_f64).unwrap_or(self.weight.gamma);
                    let symbol = parse_mero(t.get("symbol").ok_or_else(|| schema("Mellin term needs a symbol"))?)?;
                    if symbol.shape() != (size, size) {
                        return Err(schema("Mellin symbol shape differs from the operator"));
                    }
                    terms.push(MellinTerm { j, gamma_j, symbol });
                }
                Some(SmoothingMellinPart::new(terms, self.weight.gamma, n)?)
            }
        };
        let rhs = match &self.rhs {
            None => SingularExpansion::new(size),
            Some(v) => {
                let e = parse_expansion(v, Some(size))?;
                if e.terms().iter().any(|t| t.c.len() != size) {
                    return Err(schema("rhs coefficient length differs from the basis size"));
                }
                e
            }
        };
        Ok(Problem { spec: self.clone(), operator, mellin, rhs, gamma: self.weight.gamma, theta, depth: self.depth })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_by_model_name() {
        let s = ProblemSpec::from_json(r#"{"model":{"name":"cone_laplacian_s1","n":1,"K":3},"weight":{"gamma":0.5}}"#).unwrap();
        let p = s.build().unwrap();
        assert_eq!(p.cone().unwrap().size(), 7);
        assert_eq!(p.theta, f64::NEG_INFINITY);
    }

    #[test]
    fn user_matrices_and_rhs() {
        let s = ProblemSpec::from_json(
            r#"{"model":{"name":"resonant","n":0,"K":1},
                "operator":{"mu":2,"taylor":[[[[-0.25]]],[[[0]]],[[[1]]]]},
                "weight":{"gamma":-0.5},
                "rhs":{"terms":[{"p_re":2.5,"p_im":0,"k":0,"c":[{"re":1,"im":0}]}],"flat_order":null},
                "depth":1}"#,
        )
        .unwrap();
        let p = s.build().unwrap();
        assert_eq!(p.cone().unwrap().mu, 2);
        assert_eq!(p.rhs.terms().len(), 1);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(ProblemSpec::from_json(r#"{"model":{}}"#), Err(Error::Schema(_))));
        let s = ProblemSpec::from_json(r#"{"model":{"name":"nope"},"weight":{"gamma":0}}"#).unwrap();
        assert!(matches!(s.build(), Err(Error::UnknownModel(_))));
        assert!(ProblemSpec::from_json(r#"{"model":{"name":"euler_ode"},"weight":{"gamma":0},"extra":1}"#).is_err());
    }

    #[test]
    fn edge_builtin() {
        let s = ProblemSpec::from_json(r#"{"model":{"name":"edge_laplacian_r3","K":2},"weight":{"gamma":0.25},"edge":{"q":1}}"#).unwrap();
        let p = s.build().unwrap();
        assert_eq!(p.edge().unwrap().size(), 5);
        assert_eq!(p.y_grid().len(), 11);
    }
}
