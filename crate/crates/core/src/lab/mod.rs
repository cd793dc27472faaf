//! Grid realization of twisted convolution, twisted derivatives and the
//! adapted Fourier transform on `V = ℝ^{2n}`, `n ∈ {1, 2}`.
//!
//! Samples sit at `-L/2 + k·h`, `h = L/m`, stored row-major over the axes
//! `(x_1..x_n, y_1..y_n)`.

pub mod checks;
pub mod convolve;
pub mod deriv;
pub mod fourier;
pub mod io;

pub use checks::{central_transform_identity, semigroup_check, small_time_error, HGrid, SemigroupCheck};
pub use convolve::{boundary_mass_fraction, twisted_convolve, twisted_convolve_hat};
pub use deriv::{apply_l_tilde, twisted_derivative, Side};
pub use fourier::adapted_fourier;

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub l: f64,
    pub m: usize,
}

impl Grid {
    pub fn new(n: usize, l: f64, m: usize) -> Result<Self> {
        if !(n == 1 || n == 2) {
            return Err(Error::Grid(format!("n = {n}; only n = 1 or 2 is supported")));
        }
        if m < 8 || !m.is_power_of_two() {
            return Err(Error::Grid(format!("m = {m} must be a power of two ≥ 8")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Grid(format!("extent L = {l} must be positive")));
        }
        Ok(Grid { n, l, m })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn h(&self) -> f64 {
        self.l / self.m as f64
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `h^{2n}`.
    pub fn cell(&self) -> f64 {
        self.h().powi(self.dim() as i32)
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.l / 2.0 + k as f64 * self.h()
    }

    /// `L² = m`: the sample grid is its own frequency grid.
    pub fn is_self_dual(&self) -> bool {
        (self.l * self.l - self.m as f64).abs() <= 1e-9 * self.m as f64
    }

    /// Per-axis indices of a flat index.
    pub fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        let d = self.dim();
        let mut out = vec![0; d];
        for a in (0..d).rev() {
            out[a] = idx % self.m;
            idx /= self.m;
        }
        out
    }

    pub fn flatten(&self, ix: &[usize]) -> usize {
        ix.iter().fold(0, |acc, &k| acc * self.m + k)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.unflatten(idx).into_iter().map(|k| self.coord(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub data: Vec<C64>,
}

impl GridFunction {
    pub fn new(grid: Grid, data: Vec<C64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Grid(format!("{} samples for a grid of {}", data.len(), grid.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Grid("non-finite sample".into()));
        }
        Ok(GridFunction { grid, data })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, data: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> C64) -> Self {
        let data = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        GridFunction { grid, data }
    }

    pub fn norm2(&self) -> f64 {
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell()).sqrt()
    }

    pub fn norm1(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).sum::<f64>() * self.grid.cell()
    }

    pub fn integral(&self) -> C64 {
        self.data.iter().sum::<C64>() * self.grid.cell()
    }

    /// `⟨f, g⟩ = ∫ f ḡ`.
    pub fn inner(&self, other: &GridFunction) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum::<C64>() * self.grid.cell()
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        GridFunction { grid: self.grid, data }
    }

    pub fn scale(&self, s: C64) -> GridFunction {
        GridFunction { grid: self.grid, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `‖self - other‖₂ / ‖other‖₂`.
    pub fn rel_error(&self, other: &GridFunction) -> f64 {
        self.sub(other).norm2() / other.norm2()
    }
}

fn same_grid(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.grid != g.grid {
        return Err(Error::Grid("functions live on different grids".into()));
    }
    Ok(())
}
