//! JSON input parsing and report helpers.
//!
//! Scalars in inputs are JSON integers, rational strings `"a/b"` or (float
//! mode only) JSON floats. Reports print rationals as `"a/b"` strings and
//! floats as numbers rounded to ten decimals. Objects are `serde_json`
//! maps, whose keys serialize in sorted order.

use serde_json::{json, Map, Value};

use crate::curvature::{so_basis, ShapeFamily};
use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, Field, Q};
use crate::linalg::Matrix;
use crate::pseudo_euclidean::SignatureSpace;

/// Rounds a float for reporting, mapping `-0` to `0`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r = (x * 1e10).round() / 1e10;
    json!(if r == 0.0 { 0.0 } else { r })
}

pub fn scalar<F: Field>(x: &F) -> Value {
    if F::EXACT {
        Value::String(x.to_report())
    } else {
        num(x.to_f64())
    }
}

pub fn vector<F: Field>(v: &[F]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn matrix<F: Field>(m: &Matrix<F>) -> Value {
    Value::Array((0..m.rows()).map(|i| vector(m.row(i))).collect())
}

pub fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

/// Reads a scalar. Exact fields reject JSON floats so that no binary
/// rounding enters an exact computation silently.
pub fn parse_scalar<F: Field>(v: &Value) -> Result<F> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(F::from_i64(i))
            } else if F::EXACT {
                Err(Error::Input(format!("exact mode rejects the float literal {n}; write it as a rational string \"a/b\"")))
            } else {
                n.as_f64().map(F::from_f64).ok_or_else(|| Error::Input(format!("bad number {n}")))
            }
        }
        Value::String(s) => {
            let q: Q = parse_rational(s)?;
            if F::EXACT && !s.contains('/') && (s.contains('.') || s.contains(['e', 'E'])) {
                return Err(Error::Input(format!("exact mode rejects the float literal {s:?}; write it as \"a/b\"")));
            }
            Ok(F::from_rational(&q))
        }
        other => Err(Error::Input(format!("expected a scalar, got {other}"))),
    }
}

pub fn parse_vector<F: Field>(v: &Value) -> Result<Vec<F>> {
    v.as_array().ok_or_else(|| Error::Input("expected a list of scalars".into()))?.iter().map(parse_scalar).collect()
}

/// A matrix given as a list of rows.
pub fn parse_matrix<F: Field>(v: &Value) -> Result<Matrix<F>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Input("expected a matrix (list of rows)".into()))?
        .iter()
        .map(parse_vector)
        .collect::<Result<Vec<Vec<F>>>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Input("matrix rows have different lengths".into()));
    }
    Ok(Matrix::from_rows(rows))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Input(format!("{what} must be a JSON object")))
}

fn get<'a>(m: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| Error::Input(format!("missing \"{key}\"")))
}

fn get_usize(m: &Map<String, Value>, key: &str) -> Result<usize> {
    get(m, key)?.as_u64().map(|x| x as usize).ok_or_else(|| Error::Input(format!("\"{key}\" must be a non-negative integer")))
}

pub fn parse_signature(v: &Value) -> Result<SignatureSpace> {
    let m = object(v, "signature")?;
    Ok(SignatureSpace::new(get_usize(m, "p")?, get_usize(m, "q")?))
}

/// `{"signature": {"p", "q"}, "tangent_dim": d, "shape_operators": {label: rows}}`
/// with labels `v1…, e1…, w1…`; missing labels are zero.
pub fn parse_shape_family<F: Field>(v: &Value) -> Result<ShapeFamily<F>> {
    let m = object(v, "shape family")?;
    let space = parse_signature(get(m, "signature")?)?;
    let d = get_usize(m, "tangent_dim")?;
    let ops_in = object(get(m, "shape_operators")?, "\"shape_operators\"")?;
    let labels = space.labels();
    if let Some(bad) = ops_in.keys().find(|k| !labels.contains(k)) {
        return Err(Error::Input(format!("unknown normal label {bad:?}; expected one of {}", labels.join(", "))));
    }
    let mut ops = Vec::with_capacity(labels.len());
    for label in &labels {
        let op = match ops_in.get(label) {
            Some(rows) => parse_matrix(rows)?,
            None => Matrix::zeros(d, d),
        };
        if op.rows() != d || op.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: op.rows().max(op.cols()) });
        }
        ops.push(op);
    }
    ShapeFamily::new(space, d, ops)
}

pub fn shape_family_json<F: Field>(s: &ShapeFamily<F>) -> Value {
    let ops: Map<String, Value> = s.space().labels().into_iter().zip(s.operators()).map(|(l, m)| (l, matrix(m))).collect();
    json!({
        "signature": {"p": s.space().p, "q": s.space().q},
        "tangent_dim": s.tangent_dim(),
        "shape_operators": ops,
    })
}

/// A matrix algebra: `{"so": n}` or `{"generators": [matrices]}` (with an
/// optional `"dim"` for the empty algebra). Returns the size and generators.
pub fn parse_algebra<F: Field>(v: &Value) -> Result<(usize, Vec<Matrix<F>>)> {
    let m = object(v, "algebra")?;
    if let Some(n) = m.get("so") {
        let n = n.as_u64().ok_or_else(|| Error::Input("\"so\" must be a non-negative integer".into()))? as usize;
        return Ok((n, so_basis(n)));
    }
    let gens = get(m, "generators")?
        .as_array()
        .ok_or_else(|| Error::Input("\"generators\" must be a list of matrices".into()))?
        .iter()
        .map(parse_matrix)
        .collect::<Result<Vec<Matrix<F>>>>()?;
    let n = match (m.get("dim"), gens.first()) {
        (Some(d), _) => d.as_u64().ok_or_else(|| Error::Input("\"dim\" must be a non-negative integer".into()))? as usize,
        (None, Some(g)) => g.rows(),
        (None, None) => return Err(Error::Input("empty algebra needs \"dim\"".into())),
    };
    if gens.iter().any(|g| g.rows() != n || g.cols() != n) {
        return Err(Error::Input(format!("generators must be {n}x{n} matrices")));
    }
    Ok((n, gens))
}

/// Rational string of an exact scalar, for callers that need it directly.
pub fn rational_string(x: &Q) -> String {
    format_rational(x)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::R64;

    #[test]
    fn exact_mode_rejects_floats() {
        assert!(parse_scalar::<Q>(&json!(0.5)).is_err());
        assert!(parse_scalar::<Q>(&json!("0.5")).is_err());
        assert_eq!(parse_scalar::<Q>(&json!("1/2")).unwrap(), Q::new(1.into(), 2.into()));
        assert_eq!(parse_scalar::<R64>(&json!(0.5)).unwrap(), R64(0.5));
    }

    #[test]
    fn shape_family_round_trip() {
        let v = json!({
            "signature": {"p": 1, "q": 1},
            "tangent_dim": 2,
            "shape_operators": {"v1": [[1, 0], [0, 1]], "e1": [["1/2", 0], [0, -1]]}
        });
        let s = parse_shape_family::<Q>(&v).unwrap();
        assert_eq!(s.operators().len(), 3);
        let back = shape_family_json(&s);
        assert_eq!(back["shape_operators"]["e1"][0][0], json!("1/2"));
        assert_eq!(parse_shape_family::<Q>(&back).unwrap(), s);
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({"zeta": 1, "alpha": 2});
        assert!(to_pretty(&v).find("alpha").unwrap() < to_pretty(&v).find("zeta").unwrap());
    }
}
