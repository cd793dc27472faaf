//! Adapted Fourier transform `f̂(w) = ∫ f(v) e^{-2πiσ(w,v)} dv` on a
//! self-dual grid (`L² = m`, so frequency and sample spacing coincide).
//!
//! Since `σ(w, v) = ξ·v` with `ξ = (-w_y, w_x)`, `f̂(w)` is the ordinary
//! transform evaluated at that rotated frequency. Per axis the ordinary
//! transform on the centred grid is
//! `F_b = h (-1)^b e^{-iπm/2} Σ_k (-1)^k f_k e^{-2πi bk/m}`.

use super::convolve::check_boundary;
use super::GridFunction;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub fn adapted_fourier(f: &GridFunction) -> Result<GridFunction> {
    if !f.grid.is_self_dual() {
        return Err(Error::Grid(format!("adapted transform needs L² = m (L = {}, m = {})", f.grid.l, f.grid.m)));
    }
    check_boundary(f)?;
    Ok(transform_unchecked(f))
}

pub(crate) fn transform_unchecked(f: &GridFunction) -> GridFunction {
    let g = f.grid;
    let (m, n, d) = (g.m, g.n, g.dim());
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let per_axis = C64::from_polar(g.h(), -PI * m as f64 / 2.0);
    let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut data = f.data.clone();
    let mut line = vec![C64::new(0.0, 0.0); m];
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        for start in 0..g.len() {
            // first element of each line along `axis`
            if (start / stride) % m != 0 {
                continue;
            }
            for k in 0..m {
                line[k] = data[start + k * stride] * sign(k);
            }
            fft.process(&mut line);
            for b in 0..m {
                data[start + b * stride] = line[b] * sign(b) * per_axis;
            }
        }
    }
    // ordinary transform F at index b; f̂ at index a reads b_j = -a_{n+j}, b_{n+j} = a_j
    let out = (0..g.len())
        .map(|i| {
            let a = g.unflatten(i);
            let mut b = vec![0usize; d];
            for j in 0..n {
                b[j] = (m - a[n + j]) % m;
                b[n + j] = a[j];
            }
            data[g.flatten(&b)]
        })
        .collect();
    GridFunction { grid: g, data: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::Grid;

    #[test]
    fn gaussian_is_fixed() {
        let g = Grid::new(1, 8.0, 64).unwrap();
        let f = GridFunction::from_fn(g, |v| C64::new((-PI * (v[0] * v[0] + v[1] * v[1])).exp(), 0.0));
        let fh = adapted_fourier(&f).unwrap();
        assert!(fh.rel_error(&f) < 1e-12);
    }

    #[test]
    fn non_self_dual_grid_rejected() {
        let g = Grid::new(1, 4.0, 64).unwrap();
        assert!(adapted_fourier(&GridFunction::zeros(g)).is_err());
    }
}
