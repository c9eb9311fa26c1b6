//! Canonical JSON: sorted keys, floats with 17 significant digits, complex
//! numbers as `{"re":..,"im":..}` and non-finite reals as `null`.

use crate::asymp::{AsymptoticType, Remainder, RemainderClass, WeightData};
use crate::error::{Error, Result};
use crate::mero::{CMatrix, MatPolynomial, MeroMatrix, PoleDatum};
use crate::parametrix::ParametrixHierarchy;
use crate::solver::{ExpansionTerm, SingularExpansion};
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use std::fmt::Write;

/// `%.17g` formatting.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let e = format!("{x:.16e}");
    let (mant, exp) = e.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        strip_zeros(&s)
    } else {
        let m = strip_zeros(mant);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn strip_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("float")));
            } else {
                write!(out, "{n}").expect("write to string");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string escape")),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key escape"));
                out.push(':');
                write_value(&m[k], out);
            }
            out.push('}');
        }
    }
}

/// Canonical single-line encoding.
pub fn to_canonical(v: &Value) -> String {
    let mut s = String::new();
    write_value(v, &mut s);
    s
}

pub fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn real_or(v: &Value, default: f64) -> Result<f64> {
    match v {
        Value::Null => Ok(default),
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Schema("number out of range".into())),
        _ => Err(Error::Schema(format!("expected a number, found {v}"))),
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

/// Accepts `{"re":..,"im":..}` or a plain real number.
pub fn parse_complex(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Object(m) => {
            let re = m.get("re").and_then(Value::as_f64);
            let im = m.get("im").map_or(Some(0.0), Value::as_f64);
            match (re, im) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(Error::Schema(format!("malformed complex number {v}"))),
            }
        }
        _ => Err(Error::Schema(format!("expected a complex number, found {v}"))),
    }
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect())).collect())
}

pub fn parse_matrix(v: &Value) -> Result<CMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::Schema("matrix must be an array of rows".into()))?;
    if rows.is_empty() {
        return Err(Error::Schema("empty matrix".into()));
    }
    let mut data = Vec::new();
    let mut width = None;
    for r in rows {
        let r = r.as_array().ok_or_else(|| Error::Schema("matrix row must be an array".into()))?;
        if *width.get_or_insert(r.len()) != r.len() || r.is_empty() {
            return Err(Error::Schema("ragged matrix".into()));
        }
        for x in r {
            data.push(parse_complex(x)?);
        }
    }
    let w = width.expect("non-empty");
    Ok(CMatrix::from_row_slice(rows.len(), w, &data))
}

pub fn polynomial(p: &MatPolynomial) -> Value {
    json!({"rows": p.rows(), "cols": p.cols(), "coeffs": p.coeffs().iter().map(matrix).collect::<Vec<_>>()})
}

pub fn parse_polynomial(v: &Value) -> Result<MatPolynomial> {
    let rows = field_usize(v, "rows")?;
    let cols = field_usize(v, "cols")?;
    let coeffs = field(v, "coeffs")?
        .as_array()
        .ok_or_else(|| Error::Schema("coeffs must be an array".into()))?
        .iter()
        .map(parse_matrix)
        .collect::<Result<Vec<_>>>()?;
    MatPolynomial::with_shape(rows, cols, coeffs).map_err(|e| Error::Schema(e.to_string()))
}

pub fn mero(m: &MeroMatrix) -> Value {
    let poles: Vec<Value> = m
        .poles()
        .iter()
        .map(|p| json!({"location": complex(p.location), "principal": p.principal.iter().map(matrix).collect::<Vec<_>>()}))
        .collect();
    json!({"poly": polynomial(m.poly()), "poles": poles})
}

pub fn parse_mero(v: &Value) -> Result<MeroMatrix> {
    let poly = parse_polynomial(field(v, "poly")?)?;
    let mut poles = Vec::new();
    for p in field(v, "poles")?.as_array().ok_or_else(|| Error::Schema("poles must be an array".into()))? {
        let location = parse_complex(field(p, "location")?)?;
        let principal = field(p, "principal")?
            .as_array()
            .ok_or_else(|| Error::Schema("principal must be an array".into()))?
            .iter()
            .map(parse_matrix)
            .collect::<Result<Vec<_>>>()?;
        poles.push(PoleDatum { location, principal });
    }
    MeroMatrix::new(poly, poles).map_err(|e| Error::Schema(e.to_string()))
}

pub fn remainder(r: &Remainder) -> Value {
    let (class, order) = match r.class {
        RemainderClass::Exact => ("exact", None),
        RemainderClass::Flat(o) => ("flat", Some(o)),
        RemainderClass::SmoothingMellin => ("smoothing_mellin", None),
        RemainderClass::Green => ("green", None),
        RemainderClass::GreenFlat(o) => ("green_flat", Some(o)),
    };
    let mut m = Map::new();
    m.insert("class".into(), json!(class));
    m.insert("green_flag".into(), json!(r.green_flag));
    if let Some(o) = order {
        m.insert("order".into(), json!(o));
    }
    Value::Object(m)
}

pub fn parse_remainder(v: &Value) -> Result<Remainder> {
    let class = field(v, "class")?.as_str().unwrap_or_default();
    let order = v.get("order").and_then(Value::as_f64).unwrap_or(0.0);
    let flag = v.get("green_flag").and_then(Value::as_bool).unwrap_or(false);
    let class = match class {
        "exact" => RemainderClass::Exact,
        "flat" => RemainderClass::Flat(order),
        "smoothing_mellin" => RemainderClass::SmoothingMellin,
        "green" => RemainderClass::Green,
        "green_flat" => RemainderClass::GreenFlat(order),
        other => return Err(Error::Schema(format!("unknown remainder class {other:?}"))),
    };
    Ok(Remainder { class, green_flag: flag })
}

pub fn weight(w: &WeightData) -> Value {
    json!({"gamma_in": w.gamma_in, "gamma_out": w.gamma_out, "theta": real(w.theta)})
}

pub fn parametrix(p: &ParametrixHierarchy) -> Value {
    json!({
        "mu": p.mu,
        "n": p.n,
        "weight": weight(&p.weight),
        "levels": p.levels.iter().map(mero).collect::<Vec<_>>(),
        "bookkeeping": p.bookkeeping.iter().map(remainder).collect::<Vec<_>>(),
        "warnings": p.warnings,
    })
}

pub fn parse_parametrix(v: &Value) -> Result<ParametrixHierarchy> {
    let w = field(v, "weight")?;
    let weight = WeightData::new(
        real_or(field(w, "gamma_in")?, f64::NAN)?,
        real_or(field(w, "gamma_out")?, f64::NAN)?,
        real_or(field(w, "theta")?, f64::NEG_INFINITY)?,
    )
    .map_err(|e| Error::Schema(e.to_string()))?;
    let levels = array(v, "levels")?.iter().map(parse_mero).collect::<Result<Vec<_>>>()?;
    let bookkeeping = array(v, "bookkeeping")?.iter().map(parse_remainder).collect::<Result<Vec<_>>>()?;
    let warnings = array(v, "warnings")?.iter().filter_map(|s| s.as_str().map(String::from)).collect();
    if levels.is_empty() || bookkeeping.len() != levels.len() {
        return Err(Error::Schema("parametrix levels and bookkeeping differ in length".into()));
    }
    Ok(ParametrixHierarchy { mu: field_usize(v, "mu")?, n: field_usize(v, "n")?, weight, levels, bookkeeping, warnings })
}

pub fn expansion(e: &SingularExpansion) -> Value {
    let terms: Vec<Value> = e
        .terms()
        .iter()
        .map(|t| json!({"p_re": t.p.re, "p_im": t.p.im, "k": t.k, "c": t.c.iter().map(|z| complex(*z)).collect::<Vec<_>>()}))
        .collect();
    json!({"terms": terms, "flat_order": real(e.flat_order)})
}

pub fn parse_expansion(v: &Value, size: Option<usize>) -> Result<SingularExpansion> {
    let mut terms = Vec::new();
    for t in array(v, "terms")? {
        let p = Complex64::new(
            field(t, "p_re")?.as_f64().ok_or_else(|| Error::Schema("p_re must be a number".into()))?,
            t.get("p_im").and_then(Value::as_f64).unwrap_or(0.0),
        );
        let k = field_usize(t, "k")?;
        let c = field(t, "c")?
            .as_array()
            .ok_or_else(|| Error::Schema("c must be an array".into()))?
            .iter()
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        terms.push(ExpansionTerm { p, k, c });
    }
    let size = size.or_else(|| terms.first().map(|t| t.c.len())).unwrap_or(1);
    let flat = real_or(v.get("flat_order").unwrap_or(&Value::Null), f64::NEG_INFINITY)?;
    SingularExpansion::from_terms(size, terms, flat).map_err(|e| Error::Schema(e.to_string()))
}

pub fn asymptotic_type(t: &AsymptoticType) -> Value {
    let pts: Vec<Value> = t.points().iter().map(|p| json!({"p_re": p.p.re, "p_im": p.p.im, "m": p.m})).collect();
    json!({"points": pts, "gamma": t.gamma, "theta": real(t.theta), "n": t.n,
           "strip": [real(t.lower_line()), real(t.upper_line())]})
}

pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Schema(format!("missing field {key:?}")))
}

pub fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?.as_array().ok_or_else(|| Error::Schema(format!("field {key:?} must be an array")))
}

pub fn field_usize(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Schema(format!("field {key:?} must be a non-negative integer")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::linalg::c64;
    use proptest::prelude::*;

    #[test]
    fn float_format_matches_printf() {
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(0.1), "0.10000000000000001");
        assert_eq!(format_float(-2.0), "-2");
        assert_eq!(format_float(1e20), "1e+20");
        assert_eq!(format_float(1.5e-7), "1.4999999999999999e-07");
        assert_eq!(format_float(123456.0), "123456");
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({"b": 1, "a": {"d": 0.5, "c": null}});
        assert_eq!(to_canonical(&v), r#"{"a":{"c":null,"d":0.5},"b":1}"#);
    }

    #[test]
    fn mero_round_trip_is_byte_stable() {
        let m = MeroMatrix::simple_pole(c64(0.5, -1.0), 2, CMatrix::from_element(2, 2, c64(0.1, 0.3)))
            .add(&MeroMatrix::identity(2));
        let s = to_canonical(&mero(&m));
        let back = parse_mero(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(to_canonical(&mero(&back)), s);
    }

    proptest! {
        #[test]
        fn floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = format_float(x);
            let v: Value = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(v.as_f64().unwrap(), x);
        }

        #[test]
        fn expansion_round_trip(ps in proptest::collection::vec((-3.0f64..3.0, 0usize..3, -5.0f64..5.0), 0..6)) {
            let mut e = SingularExpansion::with_flat_order(1, -4.0);
            for (p, k, c) in ps {
                e.add_term(c64(p, 0.0), k, &[c64(c, -c)]);
            }
            let s = to_canonical(&expansion(&e));
            let back = parse_expansion(&serde_json::from_str(&s).unwrap(), Some(1)).unwrap();
            prop_assert_eq!(to_canonical(&expansion(&back)), s);
        }
    }
}
