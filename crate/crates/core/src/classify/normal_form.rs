//! Constructive normal form `L_S = Σ_{j,k≤m} b_jk Y_j Y_k` for a Hamilton map
//! with `S² = 0` and `Re Q_S ⪰ 0`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::symplectic::{a_from_hamilton, re_q_psd, sigma, standard_j, symplectic_residual};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct NilpotentNormalForm {
    /// Dimension of the isotropic range `W`.
    pub m: usize,
    /// Coefficients `b_jk`, complex, as `[re, im]`.
    pub b: Vec<Vec<[f64; 2]>>,
    /// New basis, columns ordered (X'1..X'n, Y'1..Y'n).
    #[serde(skip)]
    pub basis: RMat,
    pub symplectic_residual: f64,
    /// Mass of the transformed coefficient matrix outside the leading
    /// `m × m` block of the Y-slots, relative to ‖A‖.
    pub block_residual: f64,
}

fn column(m: &RMat, k: usize) -> Vec<f64> {
    m.column(k).iter().copied().collect()
}

/// Build the symplectic basis described by the structure theorem: an
/// orthonormal basis `Y` of `W = real span of S`, dual vectors `X` with
/// `σ(X_i, Y_j) = δ_ij` and `σ(X_i, X_j) = 0`, and a symplectic basis of the
/// σ-complement of `span(X, Y)`.
pub fn nilpotent_normal_form(s: &CMat, rel_tol: f64) -> Result<NilpotentNormalForm> {
    let d = s.nrows();
    let n = d / 2;
    let scale = linalg::fro(s).max(f64::MIN_POSITIVE);
    let sq = linalg::fro(&(s * s)) / (scale * scale);
    if sq > rel_tol {
        return Err(Error::Hypothesis(format!("normal form needs S² = 0 (residual {sq:.3e})")));
    }
    if !re_q_psd(s, rel_tol * scale.max(1.0)).psd {
        return Err(Error::Hypothesis("normal form needs Re Q_S ⪰ 0".into()));
    }
    let j = standard_j(n);
    let y = linalg::real_span(s, 1e-8, rel_tol * scale);
    let m = y.ncols();
    let iso = linalg::fro_r(&(y.transpose() * &j * &y));
    if iso > 1e-8 {
        return Err(Error::Numeric(format!("range of S is not isotropic (residual {iso:.3e})")));
    }
    // X₀ = JY has σ(X₀_i, Y_j) = δ_ij; shifting by -½YΩ kills σ(X_i, X_j).
    let x0 = &j * &y;
    let omega = x0.transpose() * &j * &x0;
    let x = &x0 - &y * &omega * 0.5;

    let project = |v: Vec<f64>, xs: &[Vec<f64>], ys: &[Vec<f64>]| {
        let mut out = v.clone();
        for (xi, yi) in xs.iter().zip(ys) {
            let (sy, sx) = (sigma(&v, yi), sigma(&v, xi));
            for r in 0..d {
                out[r] -= sy * xi[r] - sx * yi[r];
            }
        }
        out
    };
    let mut xs: Vec<Vec<f64>> = (0..m).map(|k| column(&x, k)).collect();
    let mut ys: Vec<Vec<f64>> = (0..m).map(|k| column(&y, k)).collect();
    // Complement: symplectic Gram–Schmidt over the standard basis.
    let mut pool: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            project(e, &xs, &ys)
        })
        .collect();
    let (mut ps, mut qs) = (Vec::new(), Vec::new());
    while ps.len() + m < n {
        pool.retain(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-9);
        let mut best = (0.0, 0, 0);
        for a in 0..pool.len() {
            for b in a + 1..pool.len() {
                let w = sigma(&pool[a], &pool[b]).abs();
                if w > best.0 {
                    best = (w, a, b);
                }
            }
        }
        if best.0 < 1e-9 {
            return Err(Error::Numeric("complement basis degenerate (rank deficiency)".into()));
        }
        let e = pool[best.1].clone();
        let mut f = pool[best.2].clone();
        let w = sigma(&e, &f);
        f.iter_mut().for_each(|x| *x /= w);
        ps.push(e.clone());
        qs.push(f.clone());
        pool = pool.into_iter().map(|v| project(v, std::slice::from_ref(&e), &[f.clone()])).collect();
    }
    xs.extend(ps);
    ys.extend(qs);
    let t = RMat::from_fn(d, d, |r, k| if k < n { xs[k][r] } else { ys[k - n][r] });
    let sres = symplectic_residual(&t);
    // Coefficients in the new basis: A = T A' Tᵀ.
    let tinv = linalg::to_complex(&(-(&j * t.transpose() * &j)));
    let a = a_from_hamilton(s);
    let a_new = &tinv * &a * tinv.transpose();
    let mut off = 0.0;
    for r in 0..d {
        for c in 0..d {
            let inside = (n..n + m).contains(&r) && (n..n + m).contains(&c);
            if !inside {
                off += a_new[(r, c)].norm_sqr();
            }
        }
    }
    let b = (0..m).map(|r| (0..m).map(|c| [a_new[(n + r, n + c)].re, a_new[(n + r, n + c)].im]).collect()).collect();
    Ok(NilpotentNormalForm {
        m,
        b,
        basis: t,
        symplectic_residual: sres,
        block_residual: off.sqrt() / linalg::fro(&a).max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::symplectic::hamilton_from_a;

    #[test]
    fn y_squared_is_already_normal() {
        let spec = crate::OperatorSpec::from_expr("Y1^2", 1).unwrap();
        let s = hamilton_from_a(&spec.a).unwrap();
        let nf = nilpotent_normal_form(&s, 1e-8).unwrap();
        assert_eq!(nf.m, 1);
        assert!((nf.b[0][0][0].abs() - 1.0).abs() < 1e-12);
        assert!(nf.block_residual < 1e-12 && nf.symplectic_residual < 1e-12);
    }

    #[test]
    fn rejects_non_nilpotent() {
        let s = hamilton_from_a(&fixtures::sublaplacian_n1().a).unwrap();
        assert!(nilpotent_normal_form(&s, 1e-8).is_err());
    }
}
