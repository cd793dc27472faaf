//! Point checks of Hörmander's non-solvability condition for a pair of real
//! Hamilton maps: `p₁ = p₂ = 0` and `{p₁, p₂} ≠ 0` at a cotangent point.

use super::diophantine::{snap_rational, Q};
use crate::linalg::RMat;
use crate::symplectic::standard_j;
use num_traits::Zero;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct HormanderPoint {
    pub p1: f64,
    pub p2: f64,
    /// Value of the symbol of the commutator, `ζᵀ[S₁,S₂]Jζ`.
    pub bracket_value: f64,
    pub exact: bool,
    pub satisfies_h_at_point: bool,
}

/// Symbol `ζᵀ(SJ)ζ` of `L_S` at `ζ = (ξ, η)`.
pub fn symbol(s: &RMat, zeta: &[f64]) -> f64 {
    let a = s * standard_j(s.nrows() / 2);
    let z = nalgebra::DVector::from_column_slice(zeta);
    (z.transpose() * a * &z)[(0, 0)]
}

type QMat = Vec<Vec<Q>>;

fn snap_mat(m: &RMat) -> Option<QMat> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| snap_rational(m[(i, j)], 1_000_000, 1e-12)).collect()).collect()
}

fn qmul(a: &QMat, b: &QMat) -> QMat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    (0..r).map(|i| (0..c).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

fn qform(a: &QMat, z: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (i, zi) in z.iter().enumerate() {
        for (j, zj) in z.iter().enumerate() {
            acc += *zi * a[i][j] * *zj;
        }
    }
    acc
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Evaluate `p₁`, `p₂` and the bracket symbol at `point`. When every entry is
/// recognised as a rational the evaluation is exact; otherwise zeros are
/// judged with a threshold of 1e-10 relative to the data.
pub fn hormander_point_check(s1: &RMat, s2: &RMat, point: &[f64]) -> HormanderPoint {
    let d = s1.nrows();
    assert_eq!(point.len(), d, "point dimension must match the Hamilton maps");
    let j = standard_j(d / 2);
    let exact = snap_mat(s1)
        .zip(snap_mat(s2))
        .zip(point.iter().map(|&x| snap_rational(x, 1_000_000, 1e-12)).collect::<Option<Vec<Q>>>());
    if let Some(((q1, q2), z)) = exact {
        let qj = snap_mat(&j).expect("J is integral");
        let a1 = qmul(&q1, &qj);
        let a2 = qmul(&q2, &qj);
        let c = qmul(&qmul(&q1, &q2), &qj);
        let c2 = qmul(&qmul(&q2, &q1), &qj);
        let (p1, p2) = (qform(&a1, &z), qform(&a2, &z));
        let br = qform(&c, &z) - qform(&c2, &z);
        return HormanderPoint {
            p1: to_f64(p1),
            p2: to_f64(p2),
            bracket_value: to_f64(br),
            exact: true,
            satisfies_h_at_point: p1.is_zero() && p2.is_zero() && !br.is_zero(),
        };
    }
    let p1 = symbol(s1, point);
    let p2 = symbol(s2, point);
    let comm = s1 * s2 - s2 * s1;
    let br = symbol(&comm, point);
    let zn: f64 = point.iter().map(|x| x * x).sum();
    let scale = (s1.norm() + s2.norm()).max(1.0) * zn.max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale * (1.0 + s1.norm() + s2.norm());
    HormanderPoint {
        p1,
        p2,
        bracket_value: br,
        exact: false,
        satisfies_h_at_point: p1.abs() <= tol && p2.abs() <= tol && br.abs() > tol,
    }
}
