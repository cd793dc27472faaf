//! Heat-type kernels of the twisted operator and the analytic identities
//! they satisfy.
//!
//! In the Fourier picture the kernel is a complex Gaussian,
//! `Γ̂(w) = P · exp(-(2π/|μ|) wᵀ E w)` with `E = sym(J tan(2πtS))` and
//! `P = 1/√det cos(2πtS)` on the continued branch.

pub mod branch;
pub mod matfun;
pub mod real_block;
pub mod series;

pub use branch::{det_cos, sqrt_det_cos};
pub use matfun::{cos_sin, matrix_cos, matrix_cot, matrix_sin, matrix_tan};
pub use real_block::{gamma_real_block, real_block_kernel, RealBlockKernel};
pub use series::{decay_fit, q_t_form, series_inv_cos, series_tan, DecayFit, QtForm, SeriesValue};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::symplectic::{a_from_hamilton, standard_j_c};
use crate::tolerances::Tolerances;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct KernelHat {
    pub prefactor: C64,
    pub exponent_matrix: CMat,
    pub t: C64,
    pub mu: f64,
}

impl KernelHat {
    /// `wᵀ E w` (bilinear, no conjugation).
    pub fn quadratic(&self, w: &[C64]) -> C64 {
        linalg::bilinear(w, &self.exponent_matrix, w)
    }

    pub fn eval(&self, w: &[C64]) -> C64 {
        self.prefactor * (-(2.0 * PI / self.mu.abs()) * self.quadratic(w)).exp()
    }

    pub fn eval_real(&self, w: &[f64]) -> C64 {
        let wc: Vec<C64> = w.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.eval(&wc)
    }

    /// Closed-form inverse transform `Γ(v) = ∫ Γ̂(w) e^{-2πiσ(v,w)} dw`,
    /// valid when `Re E ≻ 0`.
    pub fn space_value(&self, v: &[f64]) -> Result<C64> {
        let d = v.len();
        let re_min = linalg::sym_eigenvalues(&linalg::re(&self.exponent_matrix)).first().copied().unwrap_or(0.0);
        if d == 0 || re_min <= 0.0 {
            return Err(Error::Hypothesis("closed-form inversion needs Re E positive definite".into()));
        }
        let einv = linalg::inverse(&self.exponent_matrix)
            .ok_or_else(|| Error::Numeric("exponent matrix singular".into()))?;
        let j = standard_j_c(d / 2);
        let vc = linalg::CVec::from_iterator(d, v.iter().map(|&x| C64::new(x, 0.0)));
        let jv: Vec<C64> = (&j * vc).iter().copied().collect();
        let q = linalg::bilinear(&jv, &einv, &jv);
        let scaled = &self.exponent_matrix * C64::new(2.0 / self.mu.abs(), 0.0);
        let root = linalg::sqrt_det_principal(&scaled);
        Ok(self.prefactor / root * (-(PI * self.mu.abs() / 2.0) * q).exp())
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::Hypothesis("μ must be a nonzero real number".into()));
    }
    Ok(())
}

/// `E_t = sym(J tan(2πtS))`.
pub fn exponent_matrix(s: &CMat, t: C64, tol: &Tolerances) -> Result<CMat> {
    let d = s.nrows();
    if t == C64::new(0.0, 0.0) {
        return Ok(CMat::zeros(d, d));
    }
    let tan = matrix_tan(s, t * (2.0 * PI), tol.det_guard)?;
    Ok(linalg::sym(&(standard_j_c(d / 2) * tan)))
}

pub fn kernel_hat(s: &CMat, mu: f64, t: C64, tol: &Tolerances) -> Result<KernelHat> {
    check_mu(mu)?;
    let exponent_matrix = exponent_matrix(s, t, tol)?;
    let root = sqrt_det_cos(s, t, tol.det_guard)?;
    Ok(KernelHat { prefactor: C64::new(1.0, 0.0) / root, exponent_matrix, t, mu })
}

pub fn gamma_hat(s: &CMat, mu: f64, t: C64, w: &[C64], tol: &Tolerances) -> Result<C64> {
    Ok(kernel_hat(s, mu, t, tol)?.eval(w))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PdeResidual {
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub residual: f64,
    /// `|Γ̂| + |rhs|`, the scale the residual is compared against.
    pub scale: f64,
}

/// Residual of `|μ| ∂_t Γ̂ = L̂ Γ̂` where `L̂ = Σ a_jk V̂_j V̂_k` and
/// `V̂_j = (μ/2)∂_{w_j} - 2πi (Jw)_j`. The time derivative is the
/// fourth-order five-point difference with step `h`; the `w` derivatives are
/// exact for the Gaussian.
pub fn pde_residual(s: &CMat, mu: f64, t: f64, w: &[f64], h: f64, tol: &Tolerances) -> Result<PdeResidual> {
    check_mu(mu)?;
    if t <= 2.0 * h {
        return Err(Error::Hypothesis(format!("t = {t} must exceed 2h = {}", 2.0 * h)));
    }
    let eval = |tt: f64| -> Result<C64> { Ok(kernel_hat(s, mu, C64::new(tt, 0.0), tol)?.eval_real(w)) };
    let dt = (eval(t - 2.0 * h)? - eval(t - h)? * 8.0 + eval(t + h)? * 8.0 - eval(t + 2.0 * h)?) / (12.0 * h);
    let lhs = dt * mu.abs();

    let kh = kernel_hat(s, mu, C64::new(t, 0.0), tol)?;
    let value = kh.eval_real(w);
    let d = w.len();
    let a = a_from_hamilton(s);
    let j = standard_j_c(d / 2);
    let hmat = &kh.exponent_matrix * C64::new(-4.0 * PI / mu.abs(), 0.0);
    let wc = linalg::CVec::from_iterator(d, w.iter().map(|&x| C64::new(x, 0.0)));
    let g = &hmat * &wc;
    let jw = &j * &wc;
    let av: Vec<C64> = (0..d).map(|k| g[k] * (mu / 2.0) - C64::new(0.0, 2.0 * PI) * jw[k]).collect();
    let trace: C64 = (0..d).flat_map(|p| (0..d).map(move |q| (p, q))).map(|(p, q)| a[(p, q)] * hmat[(q, p)]).sum();
    let rhs = value * (trace * (mu / 2.0).powi(2) + linalg::bilinear(&av, &a, &av));
    Ok(PdeResidual {
        lhs: [lhs.re, lhs.im],
        rhs: [rhs.re, rhs.im],
        residual: (lhs - rhs).norm(),
        scale: value.norm() + rhs.norm(),
    })
}

/// Smallest eigenvalue of `Re E_t`, which controls `Re wᵀE_t w` over real `w`.
pub fn positivity_margin(s: &CMat, t: f64, tol: &Tolerances) -> Result<f64> {
    let e = exponent_matrix(s, C64::new(t, 0.0), tol)?;
    Ok(linalg::sym_eigenvalues(&linalg::re(&e)).first().copied().unwrap_or(0.0))
}

/// `⟨Γ, e^{-π|v|²}⟩ = ⟨Γ̂, e^{-π|w|²}⟩ = P · det((2/|μ|)E + I)^{-1/2}`, the
/// pairing with the self-dual Gaussian. Needs `Re E ⪰ 0`.
pub fn gaussian_pairing(kh: &KernelHat) -> C64 {
    let d = kh.exponent_matrix.nrows();
    let m = &kh.exponent_matrix * C64::new(2.0 / kh.mu.abs(), 0.0) + linalg::identity(d);
    kh.prefactor / linalg::sqrt_det_principal(&m)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingBoundFit {
    pub delta: f64,
    /// `max_t |⟨Γ_{t/2π}, φ⟩| / bound(t)` over the grid.
    pub constant: f64,
    /// The same maximum over the first half of the grid.
    pub constant_first_half: f64,
    pub skipped: Vec<f64>,
}

/// Fit the constant in
/// `|⟨Γ_{t/2π}, φ⟩| ≤ C |μ|^{δ n₂}(1+|μ|^{n₂})^{1-δ} / (∏|sin tλ_k|^δ ∏|cos tω_j|)`
/// for the Gaussian `φ = e^{-π|v|²}`. Times where the kernel is not defined
/// pointwise are skipped and listed.
pub fn pairing_bound_fit(s: &CMat, mu: f64, delta: f64, ts: &[f64], tol: &Tolerances) -> Result<PairingBoundFit> {
    let clusters = crate::spectral::spectrum_clusters(s, tol)?;
    let mut lambdas = Vec::new();
    let mut omegas = Vec::new();
    for cl in &clusters {
        for _ in 0..cl.alg_mult {
            if cl.is_real && cl.lambda.re > 0.0 {
                lambdas.push(cl.lambda.re);
            } else if !cl.is_real && cl.lambda.im > 0.0 {
                omegas.push(cl.lambda);
            }
        }
    }
    let n2 = lambdas.len() as i32;
    let mut ratios = Vec::new();
    let mut skipped = Vec::new();
    for &t in ts {
        let kh = match kernel_hat(s, mu, C64::new(t / (2.0 * PI), 0.0), tol) {
            Ok(k) => k,
            Err(_) => {
                skipped.push(t);
                continue;
            }
        };
        let sines: f64 = lambdas.iter().map(|l| (t * l).sin().abs()).product();
        let coss: f64 = omegas.iter().map(|w| (t * w).cos().norm()).product();
        let bound = mu.abs().powf(delta * n2 as f64) * (1.0 + mu.abs().powi(n2)).powf(1.0 - delta)
            / (sines.powf(delta) * coss);
        ratios.push(gaussian_pairing(&kh).norm() / bound);
    }
    let half = ratios.len().div_ceil(2);
    let max = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
    Ok(PairingBoundFit { delta, constant: max(&ratios), constant_first_half: max(&ratios[..half]), skipped })
}
