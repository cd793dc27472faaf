use super::{same_grid, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::kernel::KernelHat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

const BOUNDARY_LIMIT: f64 = 1e-6;

/// Fraction of `Σ|f|²` carried by the outer `max(1, m/16)` layer of samples.
pub fn boundary_mass_fraction(f: &GridFunction) -> f64 {
    let g = f.grid;
    let layer = (g.m / 16).max(1);
    let mut total = 0.0;
    let mut outer = 0.0;
    for (i, z) in f.data.iter().enumerate() {
        let w = z.norm_sqr();
        total += w;
        if g.unflatten(i).iter().any(|&k| k < layer || k >= g.m - layer) {
            outer += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}

pub(crate) fn check_boundary(f: &GridFunction) -> Result<()> {
    let fraction = boundary_mass_fraction(f);
    if fraction >= BOUNDARY_LIMIT {
        return Err(Error::Aliasing { fraction });
    }
    Ok(())
}

/// `e^{-πiμ c_a c_b}` for all coordinate pairs.
fn phase_table(g: &Grid, mu: f64) -> Vec<C64> {
    let m = g.m;
    let mut t = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            t.push(C64::from_polar(1.0, -PI * mu * g.coord(a) * g.coord(b)));
        }
    }
    t
}

/// `(f ×_μ g)(v) = ∫ f(v - v') g(v') e^{-πiμσ(v, v')} dv'` by direct
/// quadrature. Each output sample is summed sequentially, so the result does
/// not depend on the number of threads.
pub fn twisted_convolve(f: &GridFunction, g: &GridFunction, mu: f64) -> Result<GridFunction> {
    same_grid(f, g)?;
    check_boundary(f)?;
    check_boundary(g)?;
    let grid = f.grid;
    let (m, n, d) = (grid.m, grid.n, grid.dim());
    let half = m / 2;
    let table = phase_table(&grid, mu);
    let cell = grid.cell();
    let data: Vec<C64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let iv = grid.unflatten(i);
            let mut acc = C64::new(0.0, 0.0);
            let mut kv = vec![0usize; d];
            'outer: for k in 0..grid.len() {
                let gk = g.data[k];
                if gk == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut rest = k;
                for a in (0..d).rev() {
                    kv[a] = rest % m;
                    rest /= m;
                }
                let mut fi = 0usize;
                for a in 0..d {
                    let s = iv[a] + half;
                    if s < kv[a] || s - kv[a] >= m {
                        continue 'outer;
                    }
                    fi = fi * m + (s - kv[a]);
                }
                // σ(v, v') = Σ x_j y'_j - y_j x'_j
                let mut phase = C64::new(1.0, 0.0);
                for j in 0..n {
                    phase *= table[iv[j] * m + kv[n + j]] * table[iv[n + j] * m + kv[j]].conj();
                }
                acc += f.data[fi] * gk * phase;
            }
            acc * cell
        })
        .collect();
    Ok(GridFunction { grid, data })
}

/// `f ×_μ Γ` through the Fourier side: for each `v`,
/// `(f ×_μ Γ)(v) = ∫ ĝ_v Γ̂` with `g_v(v') = f(v - v') e^{-πiμσ(v, v')}`.
/// Needs a self-dual grid. Usable when `Γ` itself is too narrow to sample.
pub fn twisted_convolve_hat(f: &GridFunction, kernel: &KernelHat, mu: f64) -> Result<GridFunction> {
    let grid = f.grid;
    if !grid.is_self_dual() {
        return Err(Error::Grid("Fourier-side convolution needs L² = m".into()));
    }
    check_boundary(f)?;
    let hat = GridFunction::from_fn(grid, |w| kernel.eval_real(w));
    let (m, n, d) = (grid.m, grid.n, grid.dim());
    let half = m / 2;
    let table = phase_table(&grid, mu);
    let data: Result<Vec<C64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let iv = grid.unflatten(i);
            let mut gv = GridFunction::zeros(grid);
            for k in 0..grid.len() {
                let kv = grid.unflatten(k);
                let mut fi = 0usize;
                let mut inside = true;
                for a in 0..d {
                    let s = iv[a] + half;
                    if s < kv[a] || s - kv[a] >= m {
                        inside = false;
                        break;
                    }
                    fi = fi * m + (s - kv[a]);
                }
                if !inside {
                    continue;
                }
                let mut phase = C64::new(1.0, 0.0);
                for j in 0..n {
                    phase *= table[iv[j] * m + kv[n + j]] * table[iv[n + j] * m + kv[j]].conj();
                }
                gv.data[k] = f.data[fi] * phase;
            }
            let ghat = super::fourier::transform_unchecked(&gv);
            Ok(ghat.data.iter().zip(&hat.data).map(|(a, b)| a * b).sum::<C64>() * grid.cell())
        })
        .collect();
    Ok(GridFunction { grid, data: data? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: Grid, a: f64, shift: f64) -> GridFunction {
        GridFunction::from_fn(grid, |v| C64::new((-PI * a * ((v[0] - shift).powi(2) + v[1] * v[1])).exp(), 0.0))
    }

    #[test]
    fn zero_mu_is_plain_convolution_of_gaussians() {
        // e^{-π|v|²} * e^{-π|v|²} = ½ e^{-π|v|²/2}
        let grid = Grid::new(1, 8.0, 32).unwrap();
        let f = gaussian(grid, 1.0, 0.0);
        let r = twisted_convolve(&f, &f, 0.0).unwrap();
        let want = GridFunction::from_fn(grid, |v| C64::new(0.5 * (-PI * (v[0] * v[0] + v[1] * v[1]) / 2.0).exp(), 0.0));
        assert!(r.rel_error(&want) < 1e-10);
    }

    #[test]
    fn wide_function_is_rejected() {
        let grid = Grid::new(1, 4.0, 16).unwrap();
        let f = gaussian(grid, 0.05, 0.0);
        assert!(matches!(twisted_convolve(&f, &f, 1.0), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn boundary_fraction_of_centered_gaussian_is_tiny() {
        let grid = Grid::new(1, 8.0, 64).unwrap();
        assert!(boundary_mass_fraction(&gaussian(grid, 1.0, 0.0)) < 1e-20);
    }
}
