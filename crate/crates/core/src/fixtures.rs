//! Named operators from the worked examples, built from their displayed
//! expressions so the parser is exercised on the displayed notation.

use crate::error::{Error, Result};
use crate::operator::OperatorSpec;

/// `Y1² + X3² + 2X3Y1 + Y3² + 2i(X1Y2 - X2Y1 - Y2Y3)` on ℍ₃: non-real and
/// real spectrum whose real part is not conjugation invariant.
pub fn example_2_3() -> OperatorSpec {
    OperatorSpec::from_expr("Y1^2 + X3^2 + 2X3Y1 + Y3^2 + 2i(X1Y2 - X2Y1 - Y2Y3)", 3).expect("fixture parses")
}

/// `X2² + X3² + Y3² + 2i(X1Y2 + bX2Y3)` on ℍ₃, `b ≠ 0`: real part is a
/// 4-step nilpotent block.
pub fn example_2_4(b: f64) -> OperatorSpec {
    OperatorSpec::from_expr(&format!("X2^2 + X3^2 + Y3^2 + 2i(X1Y2 + ({b:?})X2Y3)"), 3).expect("fixture parses")
}

/// `(m+c1)Y1² + (m-c1)Y2² + 2c2 Y1Y2 + 2i(X1Y2 - X2Y1)` on ℍ₂.
pub fn example_2_6(m: f64, c1: f64, c2: f64) -> OperatorSpec {
    OperatorSpec::from_expr(
        &format!("(({m:?})+({c1:?}))Y1^2 + (({m:?})-({c1:?}))Y2^2 + 2({c2:?})Y1Y2 + 2i(X1Y2 - X2Y1)"),
        2,
    )
    .expect("fixture parses")
}

/// `X1² + X2² + i(X2Y2 + Y2X2)` on ℍ₂: fails the cone condition.
pub fn example_4_1() -> OperatorSpec {
    OperatorSpec::from_expr("X1^2 + X2^2 + i(X2Y2 + Y2X2)", 2).expect("fixture parses")
}

/// `X1² + Y1²` on ℍ₁.
pub fn sublaplacian_n1() -> OperatorSpec {
    OperatorSpec::from_expr("X1^2 + Y1^2", 1).expect("fixture parses")
}

/// `Σ iλ_j (X_j² + Y_j²)`.
pub fn form_2p(lambdas: &[f64]) -> OperatorSpec {
    let n = lambdas.len().max(1);
    let expr: Vec<String> = lambdas
        .iter()
        .enumerate()
        .map(|(j, l)| format!("i({l:?})(X{0}^2 + Y{0}^2)", j + 1))
        .collect();
    OperatorSpec::from_expr(&expr.join(" + "), n).expect("fixture parses")
}

/// Fixture parameters accepted by [`by_name`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureParams {
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    pub b: f64,
    pub lambdas: Vec<f64>,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams { m: 5.0, c1: 3.0, c2: 4.0, b: 1.0, lambdas: vec![1.0] }
    }
}

pub const NAMES: [&str; 6] = ["example_2_3", "example_2_4", "example_2_6", "example_4_1", "sublaplacian_n1", "form_2p"];

pub fn by_name(name: &str, p: &FixtureParams) -> Result<OperatorSpec> {
    match name {
        "example_2_3" => Ok(example_2_3()),
        "example_2_4" => {
            if p.b == 0.0 {
                return Err(Error::Schema("example_2_4 needs b ≠ 0".into()));
            }
            Ok(example_2_4(p.b))
        }
        "example_2_6" => {
            if p.c1 == 0.0 && p.c2 == 0.0 {
                return Err(Error::Schema("example_2_6 needs c1² + c2² ≠ 0".into()));
            }
            Ok(example_2_6(p.m, p.c1, p.c2))
        }
        "example_4_1" => Ok(example_4_1()),
        "sublaplacian_n1" => Ok(sublaplacian_n1()),
        "form_2p" => {
            if p.lambdas.is_empty() {
                return Err(Error::Schema("form_2p needs at least one λ".into()));
            }
            Ok(form_2p(&p.lambdas))
        }
        other => Err(Error::Schema(format!("unknown fixture '{other}' (known: {})", NAMES.join(", ")))),
    }
}
