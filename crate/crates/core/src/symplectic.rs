//! Symplectic linear algebra in the canonical basis.
//!
//! Dictionary: a symmetric coefficient matrix `A` corresponds to the Hamilton
//! map `S = -AJ` and to the quadratic form `Q_S(v, w) = vᵀ M w` with
//! `M = JS = -JAJ`. Conversely `A = SJ = -JMJ`. The dual map is `S* = -Sᵀ`
//! and is never formed explicitly.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// `J = [[0, I], [-I, 0]]`.
pub fn standard_j(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = 1.0;
        j[(n + k, k)] = -1.0;
    }
    j
}

pub fn standard_j_c(n: usize) -> CMat {
    linalg::to_complex(&standard_j(n))
}

/// `σ(v, w) = vᵀJw` for real vectors.
pub fn sigma(v: &[f64], w: &[f64]) -> f64 {
    let n = v.len() / 2;
    (0..n).map(|k| v[k] * w[n + k] - v[n + k] * w[k]).sum()
}

/// `σ(v, w)` for complex vectors, bilinear (no conjugation).
pub fn sigma_c(v: &[C64], w: &[C64]) -> C64 {
    let n = v.len() / 2;
    (0..n).map(|k| v[k] * w[n + k] - v[n + k] * w[k]).sum()
}

fn half_dim(m: &CMat) -> usize {
    m.nrows() / 2
}

/// Membership residual `‖JS + SᵀJ‖`.
pub fn sp_residual(s: &CMat) -> f64 {
    let j = standard_j_c(half_dim(s));
    linalg::fro(&(&j * s + s.transpose() * &j))
}

pub fn sp_tolerance(s: &CMat, rel: f64) -> f64 {
    rel * (1.0 + linalg::fro(s))
}

pub fn is_in_sp(s: &CMat, rel: f64) -> bool {
    sp_residual(s) <= sp_tolerance(s, rel)
}

/// `S = -AJ`.
pub fn hamilton_from_a(a: &CMat) -> Result<CMat> {
    let d = a.nrows();
    if !d.is_multiple_of(2) || a.ncols() != d {
        return Err(Error::Schema("coefficient matrix must be square of even size".into()));
    }
    let scale = 1e-12 * (1.0 + linalg::fro(a));
    for i in 0..d {
        for j in i + 1..d {
            if (a[(i, j)] - a[(j, i)]).norm() > scale {
                return Err(Error::NonSymmetric { i, j });
            }
        }
    }
    let j = standard_j_c(d / 2);
    Ok(-(a * j))
}

/// `A = SJ`, symmetrized.
pub fn a_from_hamilton(s: &CMat) -> CMat {
    let j = standard_j_c(half_dim(s));
    linalg::sym(&(s * j))
}

/// Matrix of `Q_S`, `M = JS`, symmetrized.
pub fn q_of(s: &CMat, rel: f64) -> Result<CMat> {
    let r = sp_residual(s);
    if r > sp_tolerance(s, rel) {
        return Err(Error::NotInSp { residual: r });
    }
    let j = standard_j_c(half_dim(s));
    Ok(linalg::sym(&(j * s)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdResult {
    pub psd: bool,
    pub min_eig: f64,
}

/// `Re Q_S ⪰ 0` on V^ℂ. For symmetric `M`, `Re Q(z, z̄) = z̄ᴴ (Re M) z̄`, and
/// `Re M = Jᵀ (Re A) J` is congruent to `Re A`, so the test reduces to the
/// smallest eigenvalue of `Re A`.
pub fn re_q_psd(s: &CMat, tol: f64) -> PsdResult {
    let a = a_from_hamilton(s);
    let ev = linalg::sym_eigenvalues(&linalg::re(&a));
    let min_eig = ev.first().copied().unwrap_or(0.0);
    PsdResult { psd: min_eig >= -tol, min_eig }
}

/// Same test for a quadratic-form matrix `M` given directly.
pub fn re_form_psd(m: &CMat, tol: f64) -> PsdResult {
    let ev = linalg::sym_eigenvalues(&linalg::re(m));
    let min_eig = ev.first().copied().unwrap_or(0.0);
    PsdResult { psd: min_eig >= -tol, min_eig }
}

pub fn symplectic_residual(t: &RMat) -> f64 {
    let j = standard_j(t.nrows() / 2);
    linalg::fro_r(&(t.transpose() * &j * t - &j))
}

/// `T S T⁻¹` for a real symplectic `T` (inverse `-J Tᵀ J`).
pub fn symplectic_conjugate(s: &CMat, t: &RMat, rel: f64) -> Result<CMat> {
    let r = symplectic_residual(t);
    if r > rel * (1.0 + linalg::fro_r(t).powi(2)) {
        return Err(Error::NotSymplectic { residual: r });
    }
    let j = standard_j(t.nrows() / 2);
    let tinv = -(&j * t.transpose() * &j);
    Ok(linalg::to_complex(t) * s * linalg::to_complex(&tinv))
}

/// `A ↦ T A Tᵀ`, the coefficient matrix of the conjugated Hamilton map.
pub fn conjugate_a(a: &CMat, t: &RMat) -> CMat {
    let tc = linalg::to_complex(t);
    linalg::sym(&(&tc * a * tc.transpose()))
}

/// `exp(JH)` with `H` random symmetric, entries uniform in [-1, 1].
pub fn random_real_symplectic(n: usize, seed: u64) -> RMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 2 * n;
    let mut h = RMat::zeros(d, d);
    for i in 0..d {
        for k in i..d {
            let x: f64 = rng.gen_range(-1.0..=1.0);
            h[(i, k)] = x;
            h[(k, i)] = x;
        }
    }
    (standard_j(n) * h).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn j_shapes() {
        assert_eq!(standard_j(1), RMat::from_row_slice(2, 2, &[0., 1., -1., 0.]));
        let j2 = standard_j(2);
        assert_eq!(j2[(0, 2)], 1.0);
        assert_eq!(j2[(3, 1)], -1.0);
        let j3 = standard_j(3);
        assert_eq!(&j3 * &j3, -RMat::identity(6, 6));
        assert_eq!(j3.transpose(), -j3);
    }

    #[test]
    fn identity_a_gives_minus_j() {
        let s = hamilton_from_a(&CMat::identity(2, 2)).unwrap();
        assert_eq!(s, -standard_j_c(1));
        let p = re_q_psd(&s, 1e-9);
        assert!(p.psd);
        assert!((p.min_eig - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_round_trip() {
        let a = CMat::from_row_slice(2, 2, &[c(1., 2.), c(0.5, -1.), c(0.5, -1.), c(3., 0.)]);
        let s = hamilton_from_a(&a).unwrap();
        let m = q_of(&s, 1e-10).unwrap();
        let j = standard_j_c(1);
        assert!(linalg::fro(&(-(&j * m * &j) - &a)) < 1e-15);
        assert_eq!(q_of(&CMat::zeros(2, 2), 1e-10).unwrap(), CMat::zeros(2, 2));
    }

    #[test]
    fn non_sp_matrix_rejected() {
        let s = CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(q_of(&s, 1e-10), Err(Error::NotInSp { .. })));
    }

    #[test]
    fn random_symplectic_is_symplectic() {
        for seed in 0..5 {
            let t = random_real_symplectic(3, seed);
            assert!(symplectic_residual(&t) < 1e-10 * (1.0 + linalg::fro_r(&t).powi(2)));
        }
    }

    #[test]
    fn conjugation_keeps_spectrum_of_minus_j() {
        let s = -standard_j_c(1);
        let t = random_real_symplectic(1, 7);
        let sc = symplectic_conjugate(&s, &t, 1e-10).unwrap();
        let mut ev = linalg::eigenvalues(&sc);
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - c(0., -1.)).norm() < 1e-10);
        assert!((ev[1] - c(0., 1.)).norm() < 1e-10);
        assert_eq!(symplectic_conjugate(&s, &RMat::identity(2, 2), 1e-10).unwrap(), s);
    }

    #[test]
    fn conjugated_a_matches_conjugated_hamilton_map() {
        let a = CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 1.), c(0., 1.), c(2., 0.)]);
        let t = random_real_symplectic(1, 3);
        let s = hamilton_from_a(&a).unwrap();
        let lhs = hamilton_from_a(&conjugate_a(&a, &t)).unwrap();
        let rhs = symplectic_conjugate(&s, &t, 1e-10).unwrap();
        assert!(linalg::fro(&(lhs - rhs)) < 1e-10 * (1.0 + linalg::fro(&s)));
    }
}
