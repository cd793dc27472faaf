//! `√det cos(2πtS)` on the branch that equals 1 at `t = 0`, followed by
//! analytic continuation along the straight path from 0 to `t`.

use super::matfun::matrix_cos;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// `det cos(2πtS)`.
pub fn det_cos(s: &CMat, t: C64) -> C64 {
    linalg::det(&matrix_cos(s, t * (2.0 * PI)))
}

/// Continued square root of `det cos(2πtS)`. Each step picks the root closest
/// to the previous value and the step is halved until the relative change per
/// step is at most ¼, which keeps the phase increment far below π/2.
pub fn sqrt_det_cos(s: &CMat, t: C64, det_guard: f64) -> Result<C64> {
    if t == C64::new(0.0, 0.0) {
        return Ok(C64::new(1.0, 0.0));
    }
    let mut u = 0.0f64;
    let mut h = 1.0 / 32.0;
    let mut root = C64::new(1.0, 0.0);
    while u < 1.0 {
        let next = (u + h).min(1.0);
        let d = det_cos(s, t * next);
        if d.norm() < det_guard {
            return Err(Error::FocalTime { t: (t * next).re, det: d.norm() });
        }
        let cand = d.sqrt();
        let cand = if (cand - root).norm() <= (-cand - root).norm() { cand } else { -cand };
        let change = (cand - root).norm() / root.norm();
        if change > 0.25 {
            h *= 0.5;
            if h < 1e-12 {
                return Err(Error::FocalTime { t: (t * u).re, det: d.norm() });
            }
            continue;
        }
        root = cand;
        u = next;
        if change < 0.05 {
            h = (h * 1.5).min(0.25);
        }
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::symplectic::standard_j_c;

    #[test]
    fn zero_time_is_one() {
        assert_eq!(sqrt_det_cos(&standard_j_c(1), c(0., 0.), 1e-8).unwrap(), c(1., 0.));
    }

    #[test]
    fn minus_j_gives_cosh() {
        for &t in &[0.05, 0.3, 1.0] {
            let r = sqrt_det_cos(&(-standard_j_c(1)), c(t, 0.), 1e-8).unwrap();
            let want = (2.0 * PI * t).cosh();
            assert!((r - c(want, 0.)).norm() < 1e-10 * want, "{t}: {r}");
        }
    }

    #[test]
    fn continuation_passes_sign_changes_of_product() {
        // spectrum ±1 twice (two pairs): root = cos(2πt)², positive everywhere
        // away from focal times; spectrum ±1 once: root = cos(2πt) changes sign
        // only through a focal time, which is refused.
        let s = CMat::from_diagonal(&crate::linalg::CVec::from_vec(vec![c(1., 0.), c(-1., 0.)]));
        let r = sqrt_det_cos(&s, c(0.2, 0.), 1e-8).unwrap();
        assert!((r - c((2.0 * PI * 0.2).cos(), 0.)).norm() < 1e-10);
        assert!(matches!(sqrt_det_cos(&s, c(0.3, 0.), 1e-8), Err(Error::FocalTime { .. })));
    }
}
