//! Operator specifications: the coefficient matrix `A` and central parameter
//! `α` of `L = Σ a_jk V_j V_k + iαU`.

mod io;
mod parse;

pub use io::{load_spec, save_spec, spec_from_json, spec_to_json};
pub use parse::parse_operator;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// A generator of the first layer, indices starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    X(usize),
    Y(usize),
}

impl Generator {
    /// Position in the basis (X1..Xn, Y1..Yn), zero based.
    pub fn slot(self, n: usize) -> usize {
        match self {
            Generator::X(k) => k - 1,
            Generator::Y(k) => n + k - 1,
        }
    }

    pub fn from_slot(slot: usize, n: usize) -> Generator {
        if slot < n {
            Generator::X(slot + 1)
        } else {
            Generator::Y(slot - n + 1)
        }
    }
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::X(k) => write!(f, "X{k}"),
            Generator::Y(k) => write!(f, "Y{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: C64,
    pub factors: [Generator; 2],
}

/// Parsed operator before symmetrization.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorExpression {
    pub n: usize,
    pub terms: Vec<Term>,
    /// Coefficient of `U`.
    pub central: C64,
}

/// Normalized operator `Σ a_jk V_j V_k + iαU` with `A` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub n: usize,
    pub a: CMat,
    pub alpha: C64,
}

impl OperatorSpec {
    pub fn new(n: usize, a: CMat, alpha: C64) -> Result<Self> {
        validate(n, &a, alpha)?;
        Ok(OperatorSpec { n, a, alpha })
    }

    pub fn from_expr(text: &str, n: usize) -> Result<Self> {
        Ok(normalize_to_matrix(&parse_operator(text, n)?))
    }

    pub fn with_alpha(mut self, alpha: C64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Re-expand `(A, α)` as the full symmetric term list.
    pub fn expand(&self) -> OperatorExpression {
        let d = self.dim();
        let mut terms = Vec::new();
        for j in 0..d {
            for k in 0..d {
                let c = self.a[(j, k)];
                if c != C64::new(0.0, 0.0) {
                    terms.push(Term {
                        coefficient: c,
                        factors: [Generator::from_slot(j, self.n), Generator::from_slot(k, self.n)],
                    });
                }
            }
        }
        OperatorExpression { n: self.n, terms, central: C64::new(0.0, 1.0) * self.alpha }
    }
}

pub(crate) fn validate(n: usize, a: &CMat, alpha: C64) -> Result<()> {
    if n == 0 {
        return Err(Error::Schema("n must be positive".into()));
    }
    if a.nrows() != 2 * n || a.ncols() != 2 * n {
        return Err(Error::Schema(format!("A must be {0}x{0}", 2 * n)));
    }
    if !alpha.re.is_finite() || !alpha.im.is_finite() || a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Schema("non-finite entry".into()));
    }
    for i in 0..2 * n {
        for j in i + 1..2 * n {
            if a[(i, j)] != a[(j, i)] {
                return Err(Error::NonSymmetric { i, j });
            }
        }
    }
    Ok(())
}

/// Symmetrize every product with `V_jV_k = ½(V_jV_k + V_kV_j) + ½σ(e_j, e_k)U`
/// and collect the central part as `iαU`.
pub fn normalize_to_matrix(expr: &OperatorExpression) -> OperatorSpec {
    let n = expr.n;
    let d = 2 * n;
    let mut a = CMat::zeros(d, d);
    let mut u = expr.central;
    let half = C64::new(0.5, 0.0);
    for t in &expr.terms {
        let j = t.factors[0].slot(n);
        let k = t.factors[1].slot(n);
        let c = t.coefficient * half;
        a[(j, k)] += c;
        a[(k, j)] += c;
        u += c * sigma_basis(n, j, k);
    }
    // exact symmetry regardless of summation order
    for i in 0..d {
        for j in i + 1..d {
            let s = a[(i, j)];
            a[(j, i)] = s;
        }
    }
    OperatorSpec { n, a, alpha: C64::new(0.0, -1.0) * u }
}

/// `σ(e_j, e_k) = J_jk`.
fn sigma_basis(n: usize, j: usize, k: usize) -> f64 {
    if j < n && k == j + n {
        1.0
    } else if j >= n && k + n == j {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn commutator_goes_into_alpha() {
        let s = OperatorSpec::from_expr("X1*Y1", 1).unwrap();
        assert_eq!(s.a[(0, 1)], c(0.5, 0.0));
        assert_eq!(s.a[(1, 0)], c(0.5, 0.0));
        assert_eq!(s.alpha, c(0.0, -0.5));
    }

    #[test]
    fn example_4_1_matrix() {
        let s = OperatorSpec::from_expr("X1^2+X2^2+i*(X2*Y2+Y2*X2)", 2).unwrap();
        let mut want = CMat::zeros(4, 4);
        want[(0, 0)] = c(1.0, 0.0);
        want[(1, 1)] = c(1.0, 0.0);
        want[(1, 3)] = c(0.0, 1.0);
        want[(3, 1)] = c(0.0, 1.0);
        assert_eq!(s.a, want);
        assert_eq!(s.alpha, c(0.0, 0.0));
    }

    #[test]
    fn example_2_6_matrix() {
        let (m, c1, c2) = (5.0, 3.0, 4.0);
        let s = OperatorSpec::from_expr("(5+3)Y1^2+(5-3)Y2^2+2*4*Y1Y2+2i(X1Y2-X2Y1)", 2).unwrap();
        let z = c(0.0, 0.0);
        let i = c(0.0, 1.0);
        let want = CMat::from_row_slice(
            4,
            4,
            &[z, z, z, i, z, z, -i, z, z, -i, c(m + c1, 0.), c(c2, 0.), i, z, c(c2, 0.), c(m - c1, 0.)],
        );
        assert_eq!(s.a, want);
        assert_eq!(s.alpha, z);
    }

    #[test]
    fn central_term_maps_to_alpha() {
        let s = OperatorSpec::from_expr("X1^2 + 2*U", 1).unwrap();
        assert_eq!(s.alpha, c(0.0, -2.0));
    }

    #[test]
    fn symmetric_input_keeps_alpha() {
        let s = OperatorSpec::from_expr("X1Y1 + Y1X1 + 3i*U", 1).unwrap();
        assert_eq!(s.alpha, c(3.0, 0.0));
    }

    #[test]
    fn expansion_round_trip() {
        let s = OperatorSpec::from_expr("X1^2 + 2i*X1Y2 + Y2*Y1 - U", 2).unwrap();
        let again = normalize_to_matrix(&s.expand());
        assert_eq!(again, s);
    }
}
