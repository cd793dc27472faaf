//! The two-dimensional family `(m+c₁)Y₁² + (m-c₁)Y₂² + 2c₂Y₁Y₂ + 2i(X₁Y₂ - X₂Y₁)`:
//! recognition up to real symplectic change of basis and positive scaling,
//! and numerical checks of the angular symbol used in its solvability proof.

use crate::linalg::{self, CMat, RMat};
use crate::symplectic::{a_from_hamilton, sigma, standard_j, symplectic_residual};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize)]
pub struct FamilyMatch {
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    /// Normalisation factor of the imaginary part.
    pub scale: f64,
    pub pattern_residual: f64,
    pub symplectic_residual: f64,
    /// `0 < √(c₁² + c₂²) ≤ m`.
    pub in_solvable_range: bool,
}

/// Try to bring `S` to the family pattern. Returns `None` when the dimension,
/// the imaginary part, or the resulting coefficient matrix does not fit.
pub fn detect_family(s: &CMat, nilpotent: &CMat, tol: f64) -> Option<FamilyMatch> {
    if s.nrows() != 4 {
        return None;
    }
    let j = standard_j(2);
    let s2 = linalg::im(s);
    let rho2 = -(&s2 * &s2).trace() / 4.0;
    if rho2 <= 0.0 {
        return None;
    }
    let rho = rho2.sqrt();
    let s2n = &s2 / rho;
    if linalg::fro_r(&(&s2n * &s2n + RMat::identity(4, 4))) > tol {
        return None;
    }
    let scale = linalg::fro(s).max(1.0);
    let w = linalg::real_span(nilpotent, 1e-8, tol * scale);
    if w.ncols() != 2 {
        return None;
    }
    let col = |v: nalgebra::DVectorView<f64>| v.iter().copied().collect::<Vec<f64>>();
    let y1 = col(w.column(0));
    let y2: Vec<f64> = col((-&s2n * w.column(0)).as_view());
    // x with σ(x, y1) = 1, σ(x, y2) = 0 (least-norm solution).
    let rows = RMat::from_fn(2, 4, |r, c| {
        let y = if r == 0 { &y1 } else { &y2 };
        (0..4).map(|k| j[(c, k)] * y[k]).sum()
    });
    let gram = &rows * rows.transpose();
    let coeff = gram.try_inverse()? * nalgebra::DVector::from_vec(vec![1.0, 0.0]);
    let mut x1 = col((rows.transpose() * coeff).column(0));
    let sx = |x: &[f64]| col((&s2n * nalgebra::DVector::from_column_slice(x)).column(0));
    let shift = -sigma(&x1, &sx(&x1)) / 2.0;
    for k in 0..4 {
        x1[k] += shift * y2[k];
    }
    let x2: Vec<f64> = sx(&x1).iter().map(|v| -v).collect();
    let p = RMat::from_fn(4, 4, |r, c| [&x1, &x2, &y1, &y2][c][r]);
    let sres = symplectic_residual(&p);
    if sres > 1e-8 {
        return None;
    }
    let pinv = linalg::to_complex(&(-(&j * p.transpose() * &j)));
    let a = a_from_hamilton(s);
    let an = (&pinv * &a * pinv.transpose()) / C64::new(rho, 0.0);
    let i = C64::new(0.0, 1.0);
    let yb = |r: usize, c: usize| an[(2 + r, 2 + c)].re;
    let (m, c1, c2) = ((yb(0, 0) + yb(1, 1)) / 2.0, (yb(0, 0) - yb(1, 1)) / 2.0, yb(0, 1));
    let mut target = CMat::zeros(4, 4);
    target[(0, 3)] = i;
    target[(3, 0)] = i;
    target[(1, 2)] = -i;
    target[(2, 1)] = -i;
    target[(2, 2)] = C64::new(m + c1, 0.0);
    target[(3, 3)] = C64::new(m - c1, 0.0);
    target[(2, 3)] = C64::new(c2, 0.0);
    target[(3, 2)] = C64::new(c2, 0.0);
    let pattern_residual = linalg::fro(&(&an - &target)) / linalg::fro(&an).max(1.0);
    if pattern_residual > tol {
        return None;
    }
    let amp = c1.hypot(c2);
    let in_solvable_range = amp > tol * (1.0 + m.abs()) && amp <= m * (1.0 + tol);
    Some(FamilyMatch { m, c1, c2, scale: rho, pattern_residual, symplectic_residual: sres, in_solvable_range })
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolCheck {
    pub amplitude: f64,
    pub q_min: f64,
    pub q_min_angle: f64,
    pub q_nonneg: bool,
    /// `m ≥ √(c₁² + c₂²)`, to be compared with `q_nonneg`.
    pub q_nonneg_expected: bool,
    pub q_period_value: f64,
    pub q_period_expected: f64,
    /// Smallest `Q_{θ₀}(θ)` over sampled `θ ≥ θ₀`.
    pub q_forward_min: f64,
    /// "b_not_even" or "b_even", the two branches of the normalised density.
    pub branch: String,
    pub sup_coarse: f64,
    pub sup_fine: f64,
    pub fitted_c: f64,
    pub stable: bool,
}

fn q_angle(m: f64, c1: f64, c2: f64, th: f64) -> f64 {
    m + c1 * (2.0 * th).cos() + c2 * (2.0 * th).sin()
}

fn psi(c1: f64, c2: f64, th: f64) -> f64 {
    c1 / 2.0 * (2.0 * th).sin() - c2 / 2.0 * (2.0 * th).cos()
}

/// Antiderivative of `q` anchored at `θ₀`.
pub fn q_from(m: f64, c1: f64, c2: f64, th0: f64, th: f64) -> f64 {
    m * (th - th0) + psi(c1, c2, th) - psi(c1, c2, th0)
}

/// `ln|1 - e^z|` without overflow.
fn ln_abs_one_minus_exp(z: C64) -> f64 {
    if z.re > 0.0 {
        z.re + (C64::new(1.0, 0.0) - (-z).exp()).norm().ln()
    } else {
        (C64::new(1.0, 0.0) - z.exp()).norm().ln()
    }
}

/// Sup over the sampled grid of `|μ r₀ G_μ|` (or its rescaled version when
/// `Im α ∈ 2ℤ`), computed in log space.
fn sampled_sup(m: f64, c1: f64, c2: f64, alpha: C64, even: bool, n: usize) -> f64 {
    let mus: Vec<f64> = (-8..=12).map(|k| 10f64.powf(k as f64 / 4.0)).flat_map(|x| [x, -x]).collect();
    let radii: Vec<f64> = (1..=n).map(|k| 3.0 * k as f64 / n as f64).collect();
    let mut sup = 0.0f64;
    for &mu in &mus {
        for &r in &radii {
            let z = C64::new(-PI, 0.0) * alpha + PI * mu * r * r * m;
            let (ln_num_extra, ln_den) = if even {
                let x = alpha.re - mu * m * r * r;
                let lnx = if x.abs() < 1e-300 { (1.0 / PI).ln() } else { x.abs().ln() };
                let ld = if x.abs() < 1e-300 { 0.0 } else { ln_abs_one_minus_exp(C64::new(-PI * x, 0.0)) };
                (lnx, ld)
            } else {
                (0.0, ln_abs_one_minus_exp(z))
            };
            for a in 0..n {
                let th0 = 2.0 * PI * a as f64 / n as f64;
                for b in 0..n {
                    let th = th0 + 2.0 * PI * b as f64 / n as f64;
                    let ln_f = -(alpha.re / 2.0) * (th - th0) + 0.5 * mu * r * r * q_from(m, c1, c2, th0, th);
                    let v = (ln_f + ln_num_extra - ln_den - 2f64.ln()).exp();
                    sup = sup.max(v);
                }
            }
        }
    }
    sup
}

/// Checks of the angular symbol `q(θ) = m + c₁cos2θ + c₂sin2θ`, its
/// antiderivative, and boundedness of the normalised angular density.
pub fn family_symbol_check(m: f64, c1: f64, c2: f64, alpha: C64, samples: usize) -> SymbolCheck {
    let samples = samples.max(8);
    let amplitude = c1.hypot(c2);
    let (mut q_min, mut q_min_angle) = (f64::INFINITY, 0.0);
    for k in 0..samples {
        let th = PI * k as f64 / samples as f64;
        let v = q_angle(m, c1, c2, th);
        if v < q_min {
            q_min = v;
            q_min_angle = th;
        }
    }
    // Refine at the analytic critical angle as well.
    let crit = 0.5 * (-c2).atan2(-c1);
    let vc = q_angle(m, c1, c2, crit);
    if vc < q_min {
        q_min = vc;
        q_min_angle = crit.rem_euclid(PI);
    }
    let eps = 1e-12 * (1.0 + m.abs() + amplitude);
    let q_nonneg = q_min >= -eps;
    let th0 = 0.37;
    let q_period_value = q_from(m, c1, c2, th0, th0 + 2.0 * PI);
    let q_forward_min = (0..=samples)
        .map(|k| q_from(m, c1, c2, th0, th0 + 2.0 * PI * k as f64 / samples as f64))
        .fold(f64::INFINITY, f64::min);
    let even = {
        let half = alpha.im / 2.0;
        (half - half.round()).abs() < 1e-12
    };
    let coarse_n = (samples / 8).clamp(8, 64);
    let sup_coarse = sampled_sup(m, c1, c2, alpha, even, coarse_n);
    let sup_fine = sampled_sup(m, c1, c2, alpha, even, 2 * coarse_n);
    let stable = sup_fine.is_finite() && sup_fine <= 1.5 * sup_coarse.max(f64::MIN_POSITIVE);
    SymbolCheck {
        amplitude,
        q_min,
        q_min_angle,
        q_nonneg,
        q_nonneg_expected: m >= amplitude,
        q_period_value,
        q_period_expected: 2.0 * PI * m,
        q_forward_min,
        branch: if even { "b_even" } else { "b_not_even" }.into(),
        sup_coarse,
        sup_fine,
        fitted_c: sup_coarse.max(sup_fine),
        stable,
    }
}
