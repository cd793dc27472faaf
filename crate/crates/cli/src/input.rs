//! Operator and parameter inputs shared by every subcommand.

use clap::Args;
use heisolv_core::fixtures::{self, FixtureParams};
use heisolv_core::operator::load_spec;
use heisolv_core::{Error, OperatorSpec, Tolerances, C64};
use std::path::PathBuf;

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// JSON operator document.
    #[arg(long, group = "source")]
    pub spec: Option<PathBuf>,
    /// Operator expression, e.g. "X1^2 + Y1^2 + 2i X1Y1".
    #[arg(long, group = "source")]
    pub expr: Option<String>,
    /// Named fixture: example_2_3, example_2_4, example_2_6, example_4_1,
    /// sublaplacian_n1, form_2p.
    #[arg(long, group = "source")]
    pub fixture: Option<String>,
    /// Dimension for --expr (default: largest generator index).
    #[arg(long)]
    pub n: Option<usize>,
    /// Central coefficient α: "0.3", "3i", "1+2i" or "RE,IM". Added to any
    /// central term already present in the operator.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, default_value_t = 5.0)]
    pub m: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub c1: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub c2: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Frequencies for form_2p, comma separated.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub lambdas: String,
}

#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    #[arg(long)]
    pub tol_cluster: Option<f64>,
    #[arg(long)]
    pub tol_real: Option<f64>,
    #[arg(long)]
    pub tol_psd: Option<f64>,
    #[arg(long)]
    pub tol_sp: Option<f64>,
    #[arg(long)]
    pub tol_structure: Option<f64>,
    #[arg(long)]
    pub tol_subspace: Option<f64>,
    #[arg(long)]
    pub tol_nilpotent: Option<f64>,
    #[arg(long)]
    pub tol_det_guard: Option<f64>,
}

impl TolArgs {
    pub fn resolve(&self) -> Tolerances {
        let mut t = Tolerances::default();
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut t.cluster_rel, self.tol_cluster);
        set(&mut t.real_rel, self.tol_real);
        set(&mut t.psd, self.tol_psd);
        set(&mut t.sp_rel, self.tol_sp);
        set(&mut t.structure_rel, self.tol_structure);
        set(&mut t.subspace, self.tol_subspace);
        set(&mut t.nilpotent_rel, self.tol_nilpotent);
        set(&mut t.det_guard, self.tol_det_guard);
        t
    }
}

/// Parse "0.3", "-2", "3i", "-i", "1+2i", "1-2.5e-3i" or "RE,IM".
pub fn parse_complex(text: &str) -> Result<C64, Error> {
    let bad = || Error::Schema(format!("cannot read complex number '{text}'"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((re, im)) = s.split_once(',') {
        return Ok(C64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(s.parse().map_err(|_| bad())?, 0.0));
    };
    // Split at the last sign that is not an exponent sign and not leading.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    Ok(C64::new(re.parse().map_err(|_| bad())?, im))
}

fn infer_n(expr: &str) -> usize {
    let mut n = 1;
    let chars: Vec<char> = expr.chars().collect();
    for (k, c) in chars.iter().enumerate() {
        if matches!(c, 'X' | 'Y') {
            let digits: String = chars[k + 1..].iter().take_while(|d| d.is_ascii_digit()).collect();
            if let Ok(j) = digits.parse::<usize>() {
                n = n.max(j);
            }
        }
    }
    n
}

/// The operator described by the arguments, plus its echo fields.
pub struct Resolved {
    pub spec: OperatorSpec,
    pub expr: Option<String>,
    pub fixture: Option<String>,
}

impl SpecArgs {
    pub fn resolve(&self) -> Result<Resolved, Error> {
        let (spec, expr, fixture) = if let Some(path) = &self.spec {
            (load_spec(path)?, None, None)
        } else if let Some(e) = &self.expr {
            let n = self.n.unwrap_or_else(|| infer_n(e));
            (OperatorSpec::from_expr(e, n)?, Some(e.clone()), None)
        } else if let Some(name) = &self.fixture {
            let lambdas = self
                .lambdas
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Schema(format!("bad frequency '{x}'"))))
                .collect::<Result<Vec<_>, _>>()?;
            let p = FixtureParams { m: self.m, c1: self.c1, c2: self.c2, b: self.b, lambdas };
            (fixtures::by_name(name, &p)?, None, Some(name.clone()))
        } else {
            return Err(Error::Schema("one of --spec, --expr, --fixture is required".into()));
        };
        let spec = match &self.alpha {
            Some(a) => {
                let alpha = spec.alpha + parse_complex(a)?;
                spec.with_alpha(alpha)
            }
            None => spec,
        };
        Ok(Resolved { spec, expr, fixture })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| C64::new(re, im);
        assert_eq!(parse_complex("0.3").unwrap(), c(0.3, 0.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1-2.5e-3i").unwrap(), c(1.0, -2.5e-3));
        assert_eq!(parse_complex("1e-2+i").unwrap(), c(1e-2, 1.0));
        assert_eq!(parse_complex("0.5,-1").unwrap(), c(0.5, -1.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn dimension_from_expression() {
        assert_eq!(infer_n("X1^2 + Y3^2"), 3);
        assert_eq!(infer_n("i*(X1^2+Y1^2)"), 1);
    }
}
