//! Space-side kernel on a block with real semisimple spectrum `±λ_k`.
//!
//! On such a block `E` has no positive-definite real part, so `Γ` is not
//! obtained by completing a square. Instead
//! `Γ(v) = c · (|μ|/2)^n / ∏ sin(tλ_k) · exp((π/2)|μ| σ(v, cot(tS)v))`
//! at time `t/2π`, and the unit constant `c` is calibrated by pairing both
//! sides with the self-dual Gaussian `e^{-π|v|²}`, where each pairing has a
//! closed form.

use super::{gaussian_pairing, kernel_hat};
use super::matfun::matrix_cot;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::spectral::spectrum_clusters;
use crate::symplectic::standard_j_c;
use crate::tolerances::Tolerances;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct RealBlockKernel {
    pub mu: f64,
    pub t: f64,
    /// Positive representatives of the spectrum, with multiplicity.
    pub lambdas: Vec<f64>,
    pub sine_product: f64,
    /// `(π/2)|μ| sym(J cot(tS))`; the kernel is `exp(vᵀ F v)` up to the constant.
    pub exponent_matrix: CMat,
    /// Calibration constant, fixed at `t_ref`.
    pub c: C64,
    pub t_ref: f64,
    /// The same calibration repeated at `t`, when `t` is not a focal time.
    pub c_at_t: Option<C64>,
}

impl RealBlockKernel {
    pub fn amplitude(&self) -> f64 {
        (self.mu.abs() / 2.0).powi(self.lambdas.len() as i32) / self.sine_product
    }

    pub fn eval(&self, v: &[f64]) -> C64 {
        let vc: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.c * self.amplitude() * linalg::bilinear(&vc, &self.exponent_matrix, &vc).exp()
    }
}

fn real_lambdas(s: &CMat, tol: &Tolerances) -> Result<Vec<f64>> {
    let n = s.nrows() / 2;
    let clusters = spectrum_clusters(s, tol)?;
    let mut out = Vec::new();
    for cl in &clusters {
        if !cl.is_real {
            return Err(Error::Hypothesis(format!("eigenvalue {} is not real", cl.lambda)));
        }
        if cl.lambda.re > 0.0 {
            out.extend(std::iter::repeat_n(cl.lambda.re, cl.alg_mult));
        }
    }
    if out.len() != n {
        return Err(Error::Hypothesis("block must have spectrum ±λ_k with λ_k > 0".into()));
    }
    let scale = linalg::fro(s);
    let nil = clusters.iter().map(|cl| {
        let shifted = (s - linalg::identity(s.nrows()) * cl.lambda) * &cl.projector;
        linalg::fro(&shifted)
    });
    if nil.fold(0.0, f64::max) > tol.structure_rel * scale.max(1.0) {
        return Err(Error::Hypothesis("block is not semisimple".into()));
    }
    Ok(out)
}

struct Uncalibrated {
    sine_product: f64,
    form: CMat,
}

fn uncalibrated(s: &CMat, mu: f64, t: f64, lambdas: &[f64], tol: &Tolerances) -> Result<Uncalibrated> {
    let sine_product: f64 = lambdas.iter().map(|l| (t * l).sin()).product();
    if sine_product.abs() < tol.det_guard {
        return Err(Error::Hypothesis(format!("sin(tλ) vanishes at t = {t}")));
    }
    let cot = matrix_cot(s, C64::new(t, 0.0), tol.det_guard)?;
    let j = standard_j_c(s.nrows() / 2);
    let form = linalg::sym(&(j * cot)) * C64::new(PI / 2.0 * mu.abs(), 0.0);
    let max_re = linalg::sym_eigenvalues(&linalg::re(&form)).last().copied().unwrap_or(0.0);
    if max_re > tol.psd * linalg::fro(&form).max(1.0) {
        return Err(Error::Hypothesis(format!("exponent not integrable (Re eigenvalue {max_re:.3e})")));
    }
    Ok(Uncalibrated { sine_product, form })
}

/// Ratio of the Fourier-side and space-side Gaussian pairings at time `t`.
fn calibrate(s: &CMat, mu: f64, t: f64, lambdas: &[f64], tol: &Tolerances) -> Result<C64> {
    let d = s.nrows();
    let u = uncalibrated(s, mu, t, lambdas, tol)?;
    let kh = kernel_hat(s, mu, C64::new(t / (2.0 * PI), 0.0), tol)?;
    let id = linalg::identity(d);
    let fourier = gaussian_pairing(&kh);
    let amp = (mu.abs() / 2.0).powi(lambdas.len() as i32) / u.sine_product;
    let space = amp / linalg::sqrt_det_principal(&(&id - &u.form * C64::new(1.0 / PI, 0.0)));
    Ok(fourier / space)
}

/// Kernel at time `t/2π` (so that the trigonometric arguments are `tλ_k`).
pub fn real_block_kernel(s: &CMat, mu: f64, t: f64, tol: &Tolerances) -> Result<RealBlockKernel> {
    if mu == 0.0 {
        return Err(Error::Hypothesis("μ must be nonzero".into()));
    }
    let lambdas = real_lambdas(s, tol)?;
    let lmax = lambdas.iter().copied().fold(0.0, f64::max);
    let t_ref = PI / (4.0 * lmax);
    let c = calibrate(s, mu, t_ref, &lambdas, tol)?;
    let c_at_t = calibrate(s, mu, t, &lambdas, tol).ok();
    let u = uncalibrated(s, mu, t, &lambdas, tol)?;
    Ok(RealBlockKernel { mu, t, lambdas, sine_product: u.sine_product, exponent_matrix: u.form, c, t_ref, c_at_t })
}

pub fn gamma_real_block(s: &CMat, mu: f64, t: f64, v: &[f64], tol: &Tolerances) -> Result<C64> {
    Ok(real_block_kernel(s, mu, t, tol)?.eval(v))
}
