//! Spectral structure of a Hamilton map: eigenvalue clusters, spectral
//! projectors, the split `S = S_r + S_i` into real and non-real spectrum, and
//! the Jordan pair `S = D + N`.
//!
//! Clusters come from the Schur eigenvalues. A defective block of size `k`
//! spreads under rounding to a ring of radius about `ε^{1/k}`, so the cluster
//! radius depends on the candidate size. Projectors are Riesz integrals
//! `P = (2πi)⁻¹ ∮ (z - S)⁻¹ dz` on circles around each cluster centre,
//! evaluated with the trapezoid rule, which converges geometrically.

mod predicates;
mod report;

pub use predicates::{
    check_property_c, check_property_r, check_re_q_sr, compute_w_k, cone_condition, prop3a_checks, ConeCondition,
    Prop3A, Prop3ARow, PropertyC, PropertyR, ReQSr, WKReport,
};
pub use report::{structural_report, ClusterSummary, HamiltonStructure, StructuralReport};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::tolerances::Tolerances;
use num_complex::Complex64 as C64;

const CONTOUR_NODES: usize = 128;
const PROJECTOR_NORM_CAP: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct SpectrumCluster {
    pub lambda: C64,
    pub alg_mult: usize,
    /// Orthonormal basis of the generalized eigenspace.
    pub basis: CMat,
    /// Spectral projector onto the generalized eigenspace.
    pub projector: CMat,
    pub is_real: bool,
    /// Imaginary part within twice the real threshold but above it.
    pub ambiguous_real: bool,
}

#[derive(Debug, Clone)]
pub struct SplitDecomposition {
    pub s_r: CMat,
    pub s_i: CMat,
    pub p_r: CMat,
    pub basis_vr: CMat,
    pub basis_vi: CMat,
}

#[derive(Debug, Clone)]
pub struct JordanPair {
    pub d: CMat,
    pub n: CMat,
}

/// Radius within which `k` eigenvalues count as one cluster.
fn cluster_radius(k: usize, scale: f64, tol: &Tolerances) -> f64 {
    scale * tol.cluster_rel.max(1e-13f64.powf(1.0 / k as f64))
}

fn centroid(vals: &[C64]) -> C64 {
    vals.iter().sum::<C64>() / vals.len() as f64
}

/// Group eigenvalues into ±-paired clusters with spectral projectors.
pub fn spectrum_clusters(s: &CMat, tol: &Tolerances) -> Result<Vec<SpectrumCluster>> {
    let d = s.nrows();
    let scale = linalg::fro(s);
    if scale == 0.0 {
        return Ok(vec![SpectrumCluster {
            lambda: C64::new(0.0, 0.0),
            alg_mult: d,
            basis: linalg::identity(d),
            projector: linalg::identity(d),
            is_real: true,
            ambiguous_real: false,
        }]);
    }
    let ev = linalg::eigenvalues(s);
    if ev.len() != d || ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("eigenvalue computation failed".into()));
    }

    // greedy grouping, largest admissible cluster first
    let mut assigned = vec![false; d];
    let mut groups: Vec<Vec<C64>> = Vec::new();
    for i in 0..d {
        if assigned[i] {
            continue;
        }
        let mut cand: Vec<usize> = (0..d).filter(|&j| !assigned[j]).collect();
        cand.sort_by(|&a, &b| (ev[a] - ev[i]).norm().total_cmp(&(ev[b] - ev[i]).norm()));
        for k in (1..=cand.len()).rev() {
            let members: Vec<C64> = cand[..k].iter().map(|&j| ev[j]).collect();
            let c = centroid(&members);
            if members.iter().all(|z| (z - c).norm() <= cluster_radius(k, scale, tol)) {
                for &j in &cand[..k] {
                    assigned[j] = true;
                }
                groups.push(members);
                break;
            }
        }
    }
    let mut centers: Vec<(C64, usize)> = groups.iter().map(|g| (centroid(g), g.len())).collect();

    for a in 0..centers.len() {
        for b in a + 1..centers.len() {
            let gap = (centers[a].0 - centers[b].0).norm();
            if gap <= 2.0 * cluster_radius(centers[a].1 + centers[b].1, scale, tol) {
                return Err(Error::ClusterAmbiguity {
                    gap,
                    detail: format!("clusters near {:.6} and {:.6}", centers[a].0, centers[b].0),
                });
            }
        }
    }

    // enforce λ ↔ -λ pairing and symmetrize the centres
    let mut partner = vec![usize::MAX; centers.len()];
    for a in 0..centers.len() {
        if partner[a] != usize::MAX {
            continue;
        }
        let (ca, ka) = centers[a];
        if ca.norm() <= cluster_radius(ka, scale, tol) {
            partner[a] = a;
            centers[a].0 = C64::new(0.0, 0.0);
            continue;
        }
        let best = (0..centers.len())
            .filter(|&b| b != a && partner[b] == usize::MAX)
            .min_by(|&x, &y| (centers[x].0 + ca).norm().total_cmp(&(centers[y].0 + ca).norm()));
        match best {
            Some(b)
                if centers[b].1 == ka && (centers[b].0 + ca).norm() <= cluster_radius(2 * ka, scale, tol) =>
            {
                partner[a] = b;
                partner[b] = a;
                let c = (ca - centers[b].0) * 0.5;
                centers[a].0 = c;
                centers[b].0 = -c;
            }
            _ => return Err(Error::UnpairedEigenvalue { re: ca.re, im: ca.im }),
        }
    }

    let real_tol = tol.real_rel * scale;
    let mut out = Vec::with_capacity(centers.len());
    for (a, &(mut lambda, k)) in centers.iter().enumerate() {
        let im = lambda.im.abs();
        let is_real = im <= real_tol;
        let ambiguous_real = !is_real && im <= 2.0 * real_tol;
        if is_real {
            lambda.im = 0.0;
        }
        if lambda.re.abs() <= real_tol {
            lambda.re = 0.0;
        }
        let projector = if centers.len() == 1 {
            linalg::identity(d)
        } else {
            let gap = (0..centers.len())
                .filter(|&b| b != a)
                .map(|b| (centers[b].0 - centers[a].0).norm())
                .fold(f64::INFINITY, f64::min);
            riesz_projector(s, centers[a].0, 0.5 * gap)?
        };
        let pn = linalg::norm2(&projector);
        if pn > PROJECTOR_NORM_CAP {
            return Err(Error::Numeric(format!("ill-conditioned spectral projector (norm {pn:.3e})")));
        }
        let basis = linalg::leading_left_singular(&projector, k);
        out.push(SpectrumCluster { lambda, alg_mult: k, basis, projector, is_real, ambiguous_real });
    }
    let mut total = CMat::zeros(d, d);
    for c in &out {
        total += &c.projector;
    }
    let resid = linalg::fro(&(total - linalg::identity(d)));
    if resid > 1e-6 {
        return Err(Error::Numeric(format!("spectral projectors do not resolve the identity ({resid:.3e})")));
    }
    out.sort_by(|x, y| x.lambda.re.total_cmp(&y.lambda.re).then(x.lambda.im.total_cmp(&y.lambda.im)));
    Ok(out)
}

fn riesz_projector(s: &CMat, center: C64, radius: f64) -> Result<CMat> {
    let d = s.nrows();
    let mut acc = CMat::zeros(d, d);
    for k in 0..CONTOUR_NODES {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CONTOUR_NODES as f64;
        let e = C64::from_polar(radius, theta);
        let z = center + e;
        let r = linalg::inverse(&(linalg::identity(d) * z - s))
            .ok_or_else(|| Error::Numeric("resolvent singular on projector contour".into()))?;
        acc += r * e;
    }
    Ok(acc / C64::new(CONTOUR_NODES as f64, 0.0))
}

/// `S_r = S P_r`, `S_i = S (I - P_r)` with `P_r` the projector onto the real
/// generalized eigenspaces.
pub fn split_real_nonreal(s: &CMat, clusters: &[SpectrumCluster]) -> Result<SplitDecomposition> {
    let d = s.nrows();
    if let Some(c) = clusters.iter().find(|c| c.ambiguous_real) {
        return Err(Error::AmbiguousReal { im: c.lambda.im });
    }
    let mut p_r = CMat::zeros(d, d);
    let mut mult_r = 0;
    for c in clusters.iter().filter(|c| c.is_real) {
        p_r += &c.projector;
        mult_r += c.alg_mult;
    }
    let p_i = linalg::identity(d) - &p_r;
    let basis_vr = linalg::leading_left_singular(&p_r, mult_r);
    let basis_vi = linalg::leading_left_singular(&p_i, d - mult_r);
    Ok(SplitDecomposition { s_r: s * &p_r, s_i: s * &p_i, p_r, basis_vr, basis_vi })
}

/// `D = Σ λ P_λ`, `N = S - D`.
pub fn jordan_pair(s: &CMat, clusters: &[SpectrumCluster]) -> JordanPair {
    let d_dim = s.nrows();
    let mut d = CMat::zeros(d_dim, d_dim);
    for c in clusters {
        d += &c.projector * c.lambda;
    }
    let n = s - &d;
    JordanPair { d, n }
}

/// Smallest `k` with `‖N^k‖₂ ≤ tol · r^k`, `r = max(‖N‖₂, reference)`.
/// The zero map has step 1.
pub fn nilpotency_step(n: &CMat, tol: f64, reference: f64) -> Result<usize> {
    let d = n.nrows();
    let r = linalg::norm2(n).max(reference);
    if r == 0.0 {
        return Ok(1);
    }
    let mut p = n.clone();
    for k in 1..=d.max(1) {
        if linalg::norm2(&p) <= tol * r.powi(k as i32) {
            return Ok(k);
        }
        p = &p * n;
    }
    Err(Error::NotNilpotent { residual: linalg::norm2(&p) })
}
