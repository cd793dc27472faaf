//! Matrix cosine, sine, tangent and cotangent.
//!
//! `cos` and `sin` are entire: the argument is scaled by 2^{-j} until its
//! Frobenius norm is at most ½, both series are summed until the remaining
//! terms are below 1e-18 relative, and the double-angle formulas undo the
//! scaling. `tan` and `cot` are formed by a linear solve, never by a series.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use num_complex::Complex64 as C64;

/// `(cos Y, sin Y)`.
pub fn cos_sin(y: &CMat) -> (CMat, CMat) {
    let d = y.nrows();
    let norm = linalg::fro(y);
    let mut j = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        j += 1;
    }
    let x = y * C64::new(scale, 0.0);
    let r = norm * scale;
    let mut c = linalg::identity(d);
    let mut s = x.clone();
    // term = X^k / k!, bounded in norm by r^k / k!
    let mut term = x.clone();
    let mut bound = r;
    let mut k = 1usize;
    while bound > 1e-18 && k < 64 {
        k += 1;
        term = &term * &x / C64::new(k as f64, 0.0);
        bound *= r / k as f64;
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        if k.is_multiple_of(2) {
            c += &term * C64::new(sign, 0.0);
        } else {
            s += &term * C64::new(sign, 0.0);
        }
    }
    for _ in 0..j {
        let c2 = &c * &c - &s * &s;
        let s2 = (&s * &c) * C64::new(2.0, 0.0);
        c = c2;
        s = s2;
    }
    (c, s)
}

/// `cos(τS)`.
pub fn matrix_cos(s: &CMat, tau: C64) -> CMat {
    cos_sin(&(s * tau)).0
}

/// `sin(τS)`.
pub fn matrix_sin(s: &CMat, tau: C64) -> CMat {
    cos_sin(&(s * tau)).1
}

fn check_pythagoras(c: &CMat, s: &CMat) -> Result<()> {
    let d = c.nrows();
    let resid = linalg::fro(&(c * c + s * s - linalg::identity(d)));
    let kappa = 1.0 + linalg::fro(c).powi(2) + linalg::fro(s).powi(2);
    if resid > 1e-10 * kappa {
        return Err(Error::Numeric(format!("cos² + sin² = I violated (residual {resid:.3e})")));
    }
    Ok(())
}

/// `tan(τS) = cos(τS)⁻¹ sin(τS)`, refused when `|det cos(τS)| < det_guard`.
pub fn matrix_tan(s: &CMat, tau: C64, det_guard: f64) -> Result<CMat> {
    let (c, sn) = cos_sin(&(s * tau));
    check_pythagoras(&c, &sn)?;
    let det = linalg::det(&c);
    if det.norm() < det_guard {
        return Err(Error::FocalTime { t: tau.re, det: det.norm() });
    }
    linalg::solve(&c, &sn).ok_or(Error::FocalTime { t: tau.re, det: det.norm() })
}

/// `cot(τS) = sin(τS)⁻¹ cos(τS)`, refused when `|det sin(τS)| < det_guard`.
pub fn matrix_cot(s: &CMat, tau: C64, det_guard: f64) -> Result<CMat> {
    let (c, sn) = cos_sin(&(s * tau));
    check_pythagoras(&c, &sn)?;
    let det = linalg::det(&sn);
    if det.norm() < det_guard {
        return Err(Error::Hypothesis(format!("sin(tS) singular (|det| = {:.3e})", det.norm())));
    }
    linalg::solve(&sn, &c).ok_or_else(|| Error::Hypothesis("sin(tS) singular".into()))
}
