//! Dense linear-algebra helpers over ℂ and ℝ built on nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;
pub type CVec = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn re(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fro_r(m: &RMat) -> f64 {
    m.iter().map(|z| z * z).sum::<f64>().sqrt()
}

/// Symmetric part ½(M + Mᵀ).
pub fn sym(m: &CMat) -> CMat {
    (m + m.transpose()) * C64::new(0.5, 0.0)
}

pub fn sym_r(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Largest singular value.
pub fn norm2(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn norm2_r(m: &RMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Eigenvalues of a general complex matrix from its Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let schur = nalgebra::Schur::new(m.clone());
    schur.eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn sym_eigenvalues(m: &RMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(sym_r(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigen-decomposition of a real symmetric matrix, ascending order.
pub fn sym_eigen(m: &RMat) -> (Vec<f64>, RMat) {
    let e = nalgebra::SymmetricEigen::new(sym_r(m));
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = RMat::from_fn(m.nrows(), idx.len(), |r, k| e.eigenvectors[(r, idx[k])]);
    (vals, vecs)
}

/// Append zero rows so that a thin SVD yields a complete right basis.
fn pad_rows(m: &CMat) -> CMat {
    if m.nrows() >= m.ncols() {
        return m.clone();
    }
    let mut p = CMat::zeros(m.ncols(), m.ncols());
    p.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    p
}

/// Orthonormal basis of the column space, keeping singular values above
/// `rel_tol · σ_max` (and above `abs_floor`).
pub fn column_space(m: &CMat, rel_tol: f64, abs_floor: f64) -> CMat {
    let d = m.nrows();
    if m.ncols() == 0 || d == 0 {
        return CMat::zeros(d, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd u");
    let smax = svd.singular_values.max();
    let cut = (rel_tol * smax).max(abs_floor);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > cut).collect();
    CMat::from_fn(d, keep.len(), |r, k| u[(r, keep[k])])
}

/// Leading `k` left singular vectors.
pub fn leading_left_singular(m: &CMat, k: usize) -> CMat {
    let d = m.nrows();
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd u");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    CMat::from_fn(d, k, |r, j| u[(r, idx[j])])
}

/// Orthonormal basis of the null space: right singular vectors whose singular
/// value is at most `abs_tol`.
pub fn null_space(m: &CMat, abs_tol: f64) -> CMat {
    let cols = m.ncols();
    let svd = pad_rows(m).svd(false, true);
    let vt = svd.v_t.expect("svd v_t");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= abs_tol)
        .collect();
    CMat::from_fn(cols, keep.len(), |r, k| vt[(keep[k], r)].conj())
}

pub fn null_space_r(m: &RMat, abs_tol: f64) -> RMat {
    re(&null_space(&to_complex(m), abs_tol))
}

/// Numerical rank with a relative threshold.
pub fn rank(m: &CMat, rel_tol: f64, abs_floor: f64) -> usize {
    column_space(m, rel_tol, abs_floor).ncols()
}

/// Sine of the largest principal angle between the spans of two orthonormal
/// bases; 1 when the dimensions differ.
pub fn subspace_distance(u: &CMat, v: &CMat) -> f64 {
    if u.ncols() != v.ncols() {
        return 1.0;
    }
    if u.ncols() == 0 {
        return 0.0;
    }
    let resid = u - v * (v.adjoint() * u);
    norm2(&resid).min(1.0)
}

/// Distance of span(u) from being contained in span(v) (orthonormal `v`).
pub fn containment_residual(u: &CMat, v: &CMat) -> f64 {
    if u.ncols() == 0 {
        return 0.0;
    }
    let proj = if v.ncols() == 0 { CMat::zeros(u.nrows(), u.ncols()) } else { v * (v.adjoint() * u) };
    norm2(&(u - proj))
}

/// Real orthonormal basis of the real span of the columns of a complex matrix
/// (columns of Re and Im together).
pub fn real_span(m: &CMat, rel_tol: f64, abs_floor: f64) -> RMat {
    let d = m.nrows();
    let mut big = RMat::zeros(d, 2 * m.ncols());
    for k in 0..m.ncols() {
        for r in 0..d {
            big[(r, 2 * k)] = m[(r, k)].re;
            big[(r, 2 * k + 1)] = m[(r, k)].im;
        }
    }
    re(&column_space(&to_complex(&big), rel_tol, abs_floor))
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().lu().try_inverse()
}

pub fn det(m: &CMat) -> C64 {
    if m.nrows() == 0 {
        return C64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Solve `m · x = b`.
pub fn solve(m: &CMat, b: &CMat) -> Option<CMat> {
    m.clone().lu().solve(b)
}

/// Product of principal square roots of the eigenvalues, i.e. `det(M)^{1/2}`
/// on the branch that is continuous on matrices with positive-real spectrum.
pub fn sqrt_det_principal(m: &CMat) -> C64 {
    eigenvalues(m).iter().fold(C64::new(1.0, 0.0), |acc, z| acc * z.sqrt())
}

/// `vᵀ M w` without conjugation.
pub fn bilinear(v: &[C64], m: &CMat, w: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..v.len() {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..w.len() {
            row += m[(i, j)] * w[j];
        }
        acc += v[i] * row;
    }
    acc
}

pub fn bilinear_r(v: &[f64], m: &RMat, w: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..v.len() {
        for j in 0..w.len() {
            acc += v[i] * m[(i, j)] * w[j];
        }
    }
    acc
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn commutator_r(a: &RMat, b: &RMat) -> RMat {
    a * b - b * a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix_is_complete() {
        let m = CMat::from_row_slice(1, 3, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let k = null_space(&m, 1e-12);
        assert_eq!(k.ncols(), 2);
        assert!(fro(&(&m * &k)) < 1e-14);
    }

    #[test]
    fn subspace_distance_detects_equal_and_orthogonal_spans() {
        let e1 = CMat::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let e2 = CMat::from_column_slice(2, 1, &[c(0.0, 0.0), c(0.0, 1.0)]);
        let e1i = CMat::from_column_slice(2, 1, &[c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(subspace_distance(&e1, &e1i) < 1e-15);
        assert!((subspace_distance(&e1, &e2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn principal_sqrt_det_of_positive_diagonal() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(4.0, 0.0), c(9.0, 0.0)]));
        assert!((sqrt_det_principal(&m) - c(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rank_and_column_space_agree() {
        let m = CMat::from_row_slice(3, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(rank(&m, 1e-12, 0.0), 1);
    }
}
