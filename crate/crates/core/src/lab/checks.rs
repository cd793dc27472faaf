//! Verification harness: semigroup law, contraction, the `t → 0` limit and
//! the central-transform identity on the Heisenberg group.

use super::convolve::{check_boundary, twisted_convolve, twisted_convolve_hat};
use super::fourier::adapted_fourier;
use super::{Grid, GridFunction};
use crate::error::{Error, Result};
use crate::kernel::{kernel_hat, KernelHat};
use crate::linalg::CMat;
use crate::symplectic::{re_q_psd, sigma};
use crate::tolerances::Tolerances;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize)]
pub struct SemigroupCheck {
    pub err_semigroup: f64,
    /// `max_f ‖f ×_μ Γ_t‖/‖f‖ - 1`; non-positive for a contraction.
    pub err_contraction: f64,
    /// How `Γ` was put on the grid: "fft" or "closed_form".
    pub kernel_source: String,
}

/// `Γ_t` on the grid: inverse adapted transform of `Γ̂_t` on a self-dual
/// grid, otherwise the Gaussian closed form when it applies.
pub fn kernel_on_grid(kh: &KernelHat, grid: Grid) -> Result<(GridFunction, &'static str)> {
    if grid.is_self_dual() {
        let hat = GridFunction::from_fn(grid, |w| kh.eval_real(w));
        return Ok((adapted_fourier(&hat)?, "fft"));
    }
    let data = (0..grid.len()).map(|i| kh.space_value(&grid.point(i))).collect::<Result<Vec<_>>>()?;
    Ok((GridFunction::new(grid, data)?, "closed_form"))
}

/// Random smooth test function: three Gaussian bumps with complex weights.
pub fn random_bumps(grid: Grid, rng: &mut ChaCha8Rng) -> GridFunction {
    let d = grid.dim();
    let bumps: Vec<(Vec<f64>, f64, C64)> = (0..3)
        .map(|_| {
            let centre = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let width = rng.gen_range(1.0..=3.0);
            let w = C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            (centre, width, w)
        })
        .collect();
    GridFunction::from_fn(grid, |v| {
        bumps
            .iter()
            .map(|(c, a, w)| {
                let r2: f64 = v.iter().zip(c).map(|(x, y)| (x - y).powi(2)).sum();
                w * (-PI * a * r2).exp()
            })
            .sum()
    })
}

#[allow(clippy::too_many_arguments)]
pub fn semigroup_check(
    s: &CMat,
    mu: f64,
    t: f64,
    s_time: f64,
    grid: Grid,
    tests: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<SemigroupCheck> {
    if !re_q_psd(s, tol.psd * crate::linalg::fro(s).max(1.0)).psd {
        return Err(Error::Hypothesis("semigroup check needs Re Q ⪰ 0".into()));
    }
    let ker = |tt: f64| -> Result<(GridFunction, &'static str)> {
        kernel_on_grid(&kernel_hat(s, mu, C64::new(tt, 0.0), tol)?, grid)
    };
    let (gt, source) = ker(t)?;
    let (gs, _) = ker(s_time)?;
    let (gts, _) = ker(t + s_time)?;
    let err_semigroup = twisted_convolve(&gt, &gs, mu)?.rel_error(&gts);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut err_contraction = f64::NEG_INFINITY;
    for _ in 0..tests {
        let f = random_bumps(grid, &mut rng);
        let out = twisted_convolve(&f, &gt, mu)?;
        err_contraction = err_contraction.max(out.norm2() / f.norm2() - 1.0);
    }
    Ok(SemigroupCheck { err_semigroup, err_contraction, kernel_source: source.to_string() })
}

/// `‖f ×_μ Γ_t - f‖₂ / ‖f‖₂`, evaluated on the Fourier side so that very small
/// `t` (a kernel narrower than the grid spacing) is handled.
pub fn small_time_error(s: &CMat, mu: f64, t: f64, f: &GridFunction, tol: &Tolerances) -> Result<f64> {
    let kh = kernel_hat(s, mu, C64::new(t, 0.0), tol)?;
    Ok(twisted_convolve_hat(f, &kh, mu)?.rel_error(f))
}

/// Grid on `ℍ₁ = ℝ² × ℝ`: `m` points per `V` axis over extent `l_v`, and
/// `m_u` points over extent `l_u` on the centre.
#[derive(Debug, Clone, Copy)]
pub struct HGrid {
    pub m: usize,
    pub m_u: usize,
    pub l_v: f64,
    pub l_u: f64,
}

impl HGrid {
    pub fn new(m: usize, m_u: usize, l_v: f64, l_u: f64) -> Result<Self> {
        if m > 32 || !(8..=32).contains(&m_u) {
            return Err(Error::Grid(format!("ℍ₁ grid needs 8 ≤ points per axis ≤ 32 (got {m}, {m_u})")));
        }
        Grid::new(1, l_v, m)?;
        if !(l_u > 0.0) {
            return Err(Error::Grid("central extent must be positive".into()));
        }
        Ok(HGrid { m, m_u, l_v, l_u })
    }

    fn central(&self) -> Vec<f64> {
        let h = self.l_u / self.m_u as f64;
        (0..self.m_u).map(|k| -self.l_u / 2.0 + k as f64 * h).collect()
    }
}

pub type HFun<'a> = &'a (dyn Fn(&[f64], f64) -> C64 + Sync);

fn central_transform(f: HFun, grid: Grid, us: &[f64], mu: f64) -> GridFunction {
    let hu = us[1] - us[0];
    GridFunction::from_fn(grid, |v| us.iter().map(|&u| f(v, u) * C64::from_polar(hu, -2.0 * PI * mu * u)).sum())
}

/// Relative error between `(f * g)^μ` (group convolution for the law
/// `(v,u)(v',u') = (v+v', u+u'+½σ(v,v'))`, then the central transform
/// `F^μ(v) = ∫ F(v,u) e^{-2πiμu} du`) and `f^μ ×_μ g^μ`.
pub fn central_transform_identity(f: HFun, g: HFun, mu: f64, hg: HGrid) -> Result<f64> {
    let grid = Grid::new(1, hg.l_v, hg.m)?;
    let us = hg.central();
    let hu = us[1] - us[0];
    for fun in [f, g] {
        let edge = GridFunction::from_fn(grid, |v| C64::new(fun(v, -hg.l_u / 2.0).norm() + fun(v, hg.l_u / 2.0).norm(), 0.0));
        let peak = GridFunction::from_fn(grid, |v| fun(v, 0.0));
        let emax = edge.data.iter().map(|z| z.re).fold(0.0, f64::max);
        let pmax = peak.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if emax >= 1e-6 * pmax {
            return Err(Error::Aliasing { fraction: emax / pmax });
        }
    }
    let fm = central_transform(f, grid, &us, mu);
    let gm = central_transform(g, grid, &us, mu);
    check_boundary(&fm)?;
    check_boundary(&gm)?;
    let rhs = twisted_convolve(&fm, &gm, mu)?;
    let cell = grid.cell() * hu * hu;
    let points: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let phases: Vec<C64> = us.iter().map(|&u| C64::from_polar(1.0, -2.0 * PI * mu * u)).collect();
    let lhs: Vec<C64> = points
        .par_iter()
        .map(|v| {
            let mut acc = C64::new(0.0, 0.0);
            for vp in &points {
                let shift = 0.5 * sigma(v, vp);
                let diff = [v[0] - vp[0], v[1] - vp[1]];
                for &up in &us {
                    let gval = g(vp, up);
                    if gval == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut inner = C64::new(0.0, 0.0);
                    for (&u, ph) in us.iter().zip(&phases) {
                        inner += f(&diff, u - up - shift) * ph;
                    }
                    acc += gval * inner;
                }
            }
            acc * cell
        })
        .collect();
    let lhs = GridFunction::new(grid, lhs)?;
    Ok(lhs.rel_error(&rhs))
}
