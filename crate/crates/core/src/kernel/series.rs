//! Geometric expansions of `1/cos(tω)` and `tan(tω)` for `Im ω > 0`, the
//! decay of `∏ |cos tω_j|⁻¹`, and the tangent form on the non-real part.

use super::matfun::matrix_tan;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::spectral::spectrum_clusters;
use crate::symplectic::standard_j_c;
use crate::tolerances::Tolerances;
use num_complex::Complex64 as C64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesValue {
    pub partial: [f64; 2],
    pub tail_bound: f64,
}

impl SeriesValue {
    pub fn value(&self) -> C64 {
        C64::new(self.partial[0], self.partial[1])
    }
}

fn check(omega: C64, t: f64) -> Result<f64> {
    if omega.im <= 0.0 || t <= 0.0 {
        return Err(Error::Hypothesis("series need Im ω > 0 and t > 0".into()));
    }
    Ok((-2.0 * t * omega.im).exp())
}

/// `1/cos(tω) = 2 Σ_{m≥0} (-1)^m e^{(2m+1)itω}`, first `m_terms` terms.
pub fn series_inv_cos(omega: C64, t: f64, m_terms: usize) -> Result<SeriesValue> {
    let q = check(omega, t)?;
    let i = C64::new(0.0, 1.0);
    let partial: C64 = (0..m_terms)
        .map(|m| (i * t * omega * (2 * m + 1) as f64).exp() * if m % 2 == 0 { 2.0 } else { -2.0 })
        .sum();
    let first = (i * t * omega).exp().norm();
    Ok(SeriesValue { partial: [partial.re, partial.im], tail_bound: 2.0 * q.powi(m_terms as i32) * first / (1.0 - q) })
}

/// `tan(tω) = i - 2i Σ_{p≥0} (-1)^p e^{2i(p+1)ωt}`, first `m_terms` terms.
pub fn series_tan(omega: C64, t: f64, m_terms: usize) -> Result<SeriesValue> {
    let q = check(omega, t)?;
    let i = C64::new(0.0, 1.0);
    let sum: C64 = (0..m_terms)
        .map(|p| (i * t * omega * (2 * (p + 1)) as f64).exp() * if p % 2 == 0 { 1.0 } else { -1.0 })
        .sum();
    let partial = i - i * 2.0 * sum;
    Ok(SeriesValue { partial: [partial.re, partial.im], tail_bound: 2.0 * q.powi(m_terms as i32 + 1) / (1.0 - q) })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    /// Fitted `κ` in `∏ |cos tω_j|⁻¹ ≈ C e^{-κ t}`.
    pub exponent: f64,
    pub log_constant: f64,
}

/// Least-squares fit of `ln ∏ |cos tω_j|⁻¹` against `t` on `[t0, t1]`.
pub fn decay_fit(omegas: &[C64], t0: f64, t1: f64, samples: usize) -> DecayFit {
    let samples = samples.max(2);
    let pts: Vec<(f64, f64)> = (0..samples)
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / (samples - 1) as f64;
            let y: f64 = omegas.iter().map(|w| -(t * w).cos().norm().ln()).sum();
            (t, y)
        })
        .collect();
    let nf = samples as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let slope = sxy / sxx;
    DecayFit { exponent: -slope, log_constant: my - slope * mt }
}

#[derive(Debug, Clone)]
pub struct QtForm {
    /// `sym(J tan(tS_i))`.
    pub q: CMat,
    /// `‖Q_t - Σ tan(ωt) Q_ω‖` when `S_i` is semisimple, `None` otherwise.
    pub semisimple_residual: Option<f64>,
}

/// Tangent form on the non-real part. For semisimple `S_i` the form splits
/// over the pairs `±ω` as `Σ tan(ωt) · sym(J (P_ω - P_{-ω}))`.
pub fn q_t_form(s_i: &CMat, t: f64, tol: &Tolerances) -> Result<QtForm> {
    let d = s_i.nrows();
    let j = standard_j_c(d / 2);
    let tan = matrix_tan(s_i, C64::new(t, 0.0), tol.det_guard)?;
    let q = linalg::sym(&(&j * tan));
    let scale = linalg::fro(s_i);
    let clusters = spectrum_clusters(s_i, tol)?;
    let semisimple = clusters.iter().all(|cl| {
        let shifted = (s_i - linalg::identity(d) * cl.lambda) * &cl.projector;
        linalg::fro(&shifted) <= tol.structure_rel * scale.max(1.0)
    });
    let semisimple_residual = semisimple.then(|| {
        let mut acc = CMat::zeros(d, d);
        for cl in clusters.iter().filter(|cl| cl.lambda.im > 0.0 || (cl.lambda.im == 0.0 && cl.lambda.re > 0.0)) {
            let minus = clusters.iter().find(|o| (o.lambda + cl.lambda).norm() < 1e-9 * scale.max(1.0));
            let Some(minus) = minus else { continue };
            let form = linalg::sym(&(&j * (&cl.projector - &minus.projector)));
            acc += form * (cl.lambda * t).tan();
        }
        linalg::fro(&(&q - acc))
    });
    Ok(QtForm { q, semisimple_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn inv_cos_at_i() {
        let s = series_inv_cos(c(0., 1.), 1.0, 10).unwrap();
        let exact = c(1.0 / 1f64.cosh(), 0.0);
        let err = (s.value() - exact).norm();
        assert!(err <= s.tail_bound);
        assert!(s.tail_bound <= 2.0 * (-21f64).exp() / (1.0 - (-2f64).exp()) * (1.0 + 1e-12));
    }

    #[test]
    fn tan_at_i() {
        let s = series_tan(c(0., 1.), 1.0, 10).unwrap();
        assert!((s.value() - c(0., 1f64.tanh())).norm() <= s.tail_bound);
    }

    #[test]
    fn real_omega_rejected() {
        assert!(series_tan(c(1., 0.), 1.0, 3).is_err());
    }

    #[test]
    fn minus_j_tangent_form() {
        let q = q_t_form(&(-standard_j_c(1)), 0.5, &Tolerances::default()).unwrap();
        assert!(linalg::fro(&(&q.q - linalg::identity(2) * c(0.5f64.tanh(), 0.))) < 1e-13);
        assert!(q.semisimple_residual.unwrap() < 1e-8);
    }

    #[test]
    fn zero_tangent_form() {
        let q = q_t_form(&CMat::zeros(4, 4), 0.5, &Tolerances::default()).unwrap();
        assert_eq!(linalg::fro(&q.q), 0.0);
    }
}
