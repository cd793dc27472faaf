//! JSON documents: `{"n": 1, "alpha": [re, im], "A": [[[re, im], ...], ...]}`
//! or `{"n": 1, "expr": "X1^2+Y1^2", "alpha": [re, im]}` (alpha optional and
//! added to the central part of the expression).

use super::{validate, OperatorSpec};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use num_complex::Complex64 as C64;
use serde_json::{json, Value};
use std::path::Path;

fn complex(v: &Value, what: &str) -> Result<C64> {
    match v {
        Value::Array(p) if p.len() == 2 => {
            let re = p[0].as_f64().ok_or_else(|| Error::Schema(format!("{what}: real part not a number")))?;
            let im = p[1].as_f64().ok_or_else(|| Error::Schema(format!("{what}: imaginary part not a number")))?;
            Ok(C64::new(re, im))
        }
        Value::Number(x) => Ok(C64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
        _ => Err(Error::Schema(format!("{what}: expected [re, im]"))),
    }
}

pub fn spec_from_json(doc: &Value) -> Result<OperatorSpec> {
    let obj = doc.as_object().ok_or_else(|| Error::Schema("document must be an object".into()))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Schema("missing positive integer field n".into()))? as usize;
    let alpha = match obj.get("alpha") {
        Some(v) => complex(v, "alpha")?,
        None => C64::new(0.0, 0.0),
    };
    if let Some(expr) = obj.get("expr") {
        let text = expr.as_str().ok_or_else(|| Error::Schema("expr must be a string".into()))?;
        let spec = OperatorSpec::from_expr(text, n)?;
        let total = spec.alpha + alpha;
        return OperatorSpec::new(n, spec.a, total);
    }
    let rows = obj
        .get("A")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Schema("missing field A (or expr)".into()))?;
    let d = 2 * n;
    if rows.len() != d {
        return Err(Error::Schema(format!("A must have {d} rows")));
    }
    let mut a = CMat::zeros(d, d);
    for (i, row) in rows.iter().enumerate() {
        let cols = row.as_array().ok_or_else(|| Error::Schema(format!("row {i} not an array")))?;
        if cols.len() != d {
            return Err(Error::Schema(format!("row {i} must have {d} entries")));
        }
        for (j, v) in cols.iter().enumerate() {
            a[(i, j)] = complex(v, &format!("A[{i}][{j}]"))?;
        }
    }
    OperatorSpec::new(n, a, alpha)
}

pub fn spec_to_json(spec: &OperatorSpec) -> Value {
    let d = spec.dim();
    let rows: Vec<Value> = (0..d)
        .map(|i| Value::Array((0..d).map(|j| json!([spec.a[(i, j)].re, spec.a[(i, j)].im])).collect()))
        .collect();
    json!({
        "n": spec.n,
        "alpha": [spec.alpha.re, spec.alpha.im],
        "A": rows,
    })
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<OperatorSpec> {
    let text = std::fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text)?;
    spec_from_json(&doc)
}

pub fn save_spec(spec: &OperatorSpec, path: impl AsRef<Path>) -> Result<()> {
    validate(spec.n, &spec.a, spec.alpha)?;
    let text = serde_json::to_string_pretty(&spec_to_json(spec))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let doc = json!({"n": 1, "A": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]], "alpha": 0});
        let s = spec_from_json(&doc).unwrap();
        assert_eq!(s.a, CMat::zeros(2, 2));
        assert_eq!(s.alpha, C64::new(0.0, 0.0));
    }

    #[test]
    fn asymmetric_matrix_rejected_with_pair() {
        let doc = json!({"n": 1, "A": [[[0, 0], [1, 0]], [[2, 0], [0, 0]]], "alpha": [0, 0]});
        match spec_from_json(&doc) {
            Err(Error::NonSymmetric { i, j }) => assert_eq!((i, j), (0, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn expression_document_adds_alpha() {
        let doc = json!({"n": 1, "expr": "X1*Y1", "alpha": [1.0, 0.0]});
        let s = spec_from_json(&doc).unwrap();
        assert_eq!(s.alpha, C64::new(1.0, -0.5));
    }

    #[test]
    fn file_round_trip_is_bit_exact() {
        let s = OperatorSpec::from_expr("0.1*X1^2 + (1/3)*Y1^2", 1);
        assert!(s.is_err(), "division is not part of the grammar");
        let mut s = OperatorSpec::from_expr("0.1*X1^2 + 0.3333333333333333*Y1^2 + 1e-17i*X1Y1", 1).unwrap();
        s.alpha = C64::new(std::f64::consts::PI, -1.0 / 7.0);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        save_spec(&s, &p).unwrap();
        let back = load_spec(&p).unwrap();
        assert_eq!(back, s);
    }
}
