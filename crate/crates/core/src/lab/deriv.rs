//! Twisted derivatives. Right-invariant fields (twisted convolution with
//! `∂δ` on the right): `X̃_j = ∂_{x_j} - πiμ y_j`, `Ỹ_j = ∂_{y_j} + πiμ x_j`.
//! Left-invariant fields flip the sign of the multiplication term. Both
//! satisfy `[X̃_j, Ỹ_j] = ±2πiμ`.
//!
//! The difference operator is the central difference with zero padding, a
//! skew-symmetric matrix, so every discrete field is skew-Hermitian and
//! `Re⟨L̃f, f⟩ ≤ 0` holds exactly when `Re A ⪰ 0`.

use super::GridFunction;
use crate::error::{Error, Result};
use crate::operator::OperatorSpec;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// Field in slot `j` (`X_k` is slot `k`, `Y_k` is slot `n + k`, 0-based).
pub fn twisted_derivative(f: &GridFunction, slot: usize, side: Side, mu: f64) -> Result<GridFunction> {
    let g = f.grid;
    let (m, n, d) = (g.m, g.n, g.dim());
    if slot >= d {
        return Err(Error::GeneratorOutOfRange { name: format!("slot {slot}"), n });
    }
    let stride = m.pow((d - 1 - slot) as u32);
    // partner coordinate: y_j for an X slot, x_j for a Y slot
    let (partner, sign) = if slot < n { (slot + n, -1.0) } else { (slot - n, 1.0) };
    let sign = if side == Side::Right { sign } else { -sign };
    let inv = 1.0 / (2.0 * g.h());
    let data = (0..g.len())
        .map(|i| {
            let ix = g.unflatten(i);
            let k = ix[slot];
            let up = if k + 1 < m { f.data[i + stride] } else { C64::new(0.0, 0.0) };
            let down = if k > 0 { f.data[i - stride] } else { C64::new(0.0, 0.0) };
            let mult = C64::new(0.0, sign * PI * mu * g.coord(ix[partner]));
            (up - down) * inv + mult * f.data[i]
        })
        .collect();
    Ok(GridFunction { grid: g, data })
}

/// `L̃ f = Σ a_jk Ṽ_j Ṽ_k f` with right-invariant fields.
pub fn apply_l_tilde(spec: &OperatorSpec, f: &GridFunction, mu: f64) -> Result<GridFunction> {
    let g = f.grid;
    if spec.n != g.n {
        return Err(Error::Grid(format!("operator has n = {}, grid has n = {}", spec.n, g.n)));
    }
    let d = g.dim();
    let first: Vec<GridFunction> = (0..d).map(|k| twisted_derivative(f, k, Side::Right, mu)).collect::<Result<_>>()?;
    let mut out = GridFunction::zeros(g);
    for j in 0..d {
        let mut inner = GridFunction::zeros(g);
        let mut any = false;
        for k in 0..d {
            let a = spec.a[(j, k)];
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            any = true;
            for (o, v) in inner.data.iter_mut().zip(&first[k].data) {
                *o += a * v;
            }
        }
        if any {
            let vj = twisted_derivative(&inner, j, Side::Right, mu)?;
            for (o, v) in out.data.iter_mut().zip(&vj.data) {
                *o += v;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::Grid;

    #[test]
    fn zero_mu_is_plain_derivative() {
        let g = Grid::new(1, 8.0, 64).unwrap();
        let f = GridFunction::from_fn(g, |v| C64::new((-PI * (v[0] * v[0] + v[1] * v[1])).exp(), 0.0));
        let dx = twisted_derivative(&f, 0, Side::Right, 0.0).unwrap();
        let want = GridFunction::from_fn(g, |v| C64::new(-2.0 * PI * v[0] * (-PI * (v[0] * v[0] + v[1] * v[1])).exp(), 0.0));
        assert!(dx.rel_error(&want) < 0.05);
    }

    #[test]
    fn zero_operator_gives_zero() {
        let g = Grid::new(1, 8.0, 16).unwrap();
        let f = GridFunction::from_fn(g, |v| C64::new(v[0], 1.0));
        let spec = OperatorSpec::new(1, crate::linalg::CMat::zeros(2, 2), C64::new(0.0, 0.0)).unwrap();
        assert_eq!(apply_l_tilde(&spec, &f, 1.0).unwrap(), GridFunction::zeros(g));
    }

    #[test]
    fn bad_slot_rejected() {
        let g = Grid::new(1, 8.0, 16).unwrap();
        assert!(twisted_derivative(&GridFunction::zeros(g), 2, Side::Left, 1.0).is_err());
    }
}
