//! Structural predicates on a Hamilton map and its Jordan data.

use super::report::HamiltonStructure;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::symplectic::{re_form_psd, standard_j, standard_j_c, PsdResult};
use crate::tolerances::Tolerances;
use num_complex::Complex64 as C64;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct PropertyR {
    pub holds: bool,
    /// (λ, principal-angle sine between conj(V_λ ⊕ V_-λ) and itself).
    pub witnesses: Vec<(f64, f64)>,
}

/// Conjugation invariance of `V_λ ⊕ V_-λ` for every real `λ > 0`.
pub fn check_property_r(st: &HamiltonStructure) -> PropertyR {
    let mut witnesses = Vec::new();
    for c in st.clusters.iter().filter(|c| c.is_real && c.lambda.re > 0.0) {
        let Some(partner) = st.clusters.iter().find(|o| o.is_real && (o.lambda.re + c.lambda.re).abs() < 1e-12 * (1.0 + st.scale)) else {
            continue;
        };
        let p = &c.projector + &partner.projector;
        let v = linalg::leading_left_singular(&p, c.alg_mult + partner.alg_mult);
        witnesses.push((c.lambda.re, linalg::subspace_distance(&linalg::conj(&v), &v)));
    }
    let holds = witnesses.iter().all(|w| w.1 <= st.tol.subspace);
    PropertyR { holds, witnesses }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PropertyC {
    pub holds: bool,
    /// `‖[Re D, Im D]‖ / ‖D‖²`.
    pub residual: f64,
}

/// `[Re D, Im D] = 0`.
pub fn check_property_c(d: &CMat, tol: &Tolerances) -> PropertyC {
    let dn = linalg::fro(d);
    if dn == 0.0 {
        return PropertyC { holds: true, residual: 0.0 };
    }
    let comm = linalg::commutator_r(&linalg::re(d), &linalg::im(d));
    let residual = linalg::fro_r(&comm) / (dn * dn);
    PropertyC { holds: residual <= tol.structure_rel, residual }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReQSr {
    pub holds: bool,
    /// Smallest eigenvalue of the Hermitian form of `Re Q_{S_r}`.
    pub direct: PsdResult,
    /// Relative residual of `conj(S V_r) ⊆ V_r`, when `Re Q_S ⪰ 0`.
    pub containment_residual: Option<f64>,
}

/// `Re Q_{S_r} ⪰ 0`, by the direct eigenvalue test and, when `Re Q_S ⪰ 0`,
/// by the equivalent subspace test `conj(S V_r) ⊆ V_r`.
pub fn check_re_q_sr(st: &HamiltonStructure) -> Result<ReQSr> {
    let j = standard_j_c(st.n);
    let direct = re_form_psd(&linalg::sym(&(&j * &st.split.s_r)), st.psd_tol());
    if !st.re_q.psd {
        return Ok(ReQSr { holds: direct.psd, direct, containment_residual: None });
    }
    let image = &st.s * &st.split.basis_vr;
    let resid = linalg::containment_residual(&linalg::conj(&image), &st.split.basis_vr) / st.scale.max(f64::MIN_POSITIVE);
    let by_subspace = resid <= st.tol.subspace;
    if by_subspace != direct.psd {
        return Err(Error::Numeric(format!(
            "Re Q_Sr tests disagree: eigenvalue test {} (min {:.3e}), subspace test {} (residual {:.3e})",
            direct.psd, direct.min_eig, by_subspace, resid
        )));
    }
    Ok(ReQSr { holds: direct.psd, direct, containment_residual: Some(resid) })
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop3ARow {
    pub lambda: f64,
    /// Principal-angle sine between conj Ker(S - λ) and Ker(S + λ).
    pub conj_kernel_distance: f64,
    /// `‖Re S · Ker(S ∓ λ)‖ / ‖S‖`.
    pub s1_kernel_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop3A {
    pub rows: Vec<Prop3ARow>,
    pub holds: bool,
}

/// Kernel identities for real eigenvalues under `Re Q_S ⪰ 0`:
/// `conj Ker(S - λ) = Ker(S + λ)` and `Re S · Ker(S ± λ) = 0`.
pub fn prop3a_checks(st: &HamiltonStructure) -> Result<Prop3A> {
    if !st.re_q.psd {
        return Err(Error::Hypothesis("kernel identities need Re Q_S ⪰ 0".into()));
    }
    let d = st.s.nrows();
    let s1 = linalg::to_complex(&linalg::re(&st.s));
    let scale = st.scale.max(f64::MIN_POSITIVE);
    let kernel_tol = st.tol.structure_rel * scale;
    let mut rows = Vec::new();
    for c in st.clusters.iter().filter(|c| c.is_real && c.lambda.re >= 0.0) {
        let lam = c.lambda.re;
        let kp = linalg::null_space(&(&st.s - linalg::identity(d) * C64::new(lam, 0.0)), kernel_tol);
        let km = linalg::null_space(&(&st.s + linalg::identity(d) * C64::new(lam, 0.0)), kernel_tol);
        let conj_kernel_distance = linalg::subspace_distance(&linalg::conj(&kp), &km);
        let s1_kernel_residual = (linalg::norm2(&(&s1 * &kp)).max(linalg::norm2(&(&s1 * &km)))) / scale;
        rows.push(Prop3ARow { lambda: lam, conj_kernel_distance, s1_kernel_residual });
    }
    let holds = rows.iter().all(|r| r.conj_kernel_distance <= st.tol.subspace && r.s1_kernel_residual <= st.tol.structure_rel);
    Ok(Prop3A { rows, holds })
}

#[derive(Debug, Clone, Serialize)]
pub struct WKReport {
    pub w_dim: usize,
    pub k_dim: usize,
    #[serde(skip)]
    pub w: RMat,
    #[serde(skip)]
    pub k: RMat,
    pub w_isotropic: f64,
    pub w_in_k: f64,
    pub s1_kills_k: f64,
    pub s2_preserves_k: f64,
    pub s2_preserves_w: f64,
    /// max of ‖N₁N₂‖, ‖N₂N₁‖, ‖N₁²‖, ‖N₂²‖ relative to ‖S‖².
    pub nilpotent_products: f64,
    pub s1_squared: f64,
    /// ‖[S₁, S₂] - [D₁, D₂]‖ relative to ‖S‖².
    pub commutator_identity: f64,
    pub holds: bool,
}

/// `W` = real span of the columns of `N` and its σ-orthocomplement `K`, with
/// the accompanying structural identities (real spectrum, `Re Q ⪰ 0`, `N² = 0`).
pub fn compute_w_k(st: &HamiltonStructure) -> Result<WKReport> {
    if st.clusters.iter().any(|c| !c.is_real) {
        return Err(Error::Hypothesis("W/K construction needs real spectrum".into()));
    }
    if !st.re_q.psd {
        return Err(Error::Hypothesis("W/K construction needs Re Q_S ⪰ 0".into()));
    }
    let scale = st.scale.max(f64::MIN_POSITIVE);
    let n = &st.jordan.n;
    let n2 = linalg::fro(&(n * n)) / (scale * scale);
    if n2 > st.tol.nilpotent_rel {
        return Err(Error::Hypothesis(format!("W/K construction needs N² = 0 (residual {n2:.3e})")));
    }
    let d = st.s.nrows();
    let j = standard_j(st.n);
    let w = linalg::real_span(n, 1e-8, st.tol.nilpotent_rel * scale);
    let k = if w.ncols() == 0 {
        RMat::identity(d, d)
    } else {
        linalg::null_space_r(&(&j * &w).transpose(), 1e-10)
    };
    let s1 = linalg::re(&st.s);
    let s2 = linalg::im(&st.s);
    let n1 = linalg::re(n);
    let n2m = linalg::im(n);
    let d1 = linalg::re(&st.jordan.d);
    let d2 = linalg::im(&st.jordan.d);
    let rc = |m: &RMat| linalg::to_complex(m);
    let outside = |u: &RMat, basis: &RMat| linalg::containment_residual(&rc(u), &rc(basis));
    let w_isotropic = linalg::fro_r(&(w.transpose() * &j * &w));
    let w_in_k = outside(&w, &k);
    let s1_kills_k = linalg::fro_r(&(&s1 * &k)) / scale;
    let s2_preserves_k = outside(&(&s2 * &k), &k) / scale;
    let s2_preserves_w = outside(&(&s2 * &w), &w) / scale;
    let sq = scale * scale;
    let nilpotent_products = [&n1 * &n2m, &n2m * &n1, &n1 * &n1, &n2m * &n2m]
        .iter()
        .map(linalg::fro_r)
        .fold(0.0, f64::max)
        / sq;
    let s1_squared = linalg::fro_r(&(&s1 * &s1)) / sq;
    let commutator_identity = linalg::fro_r(&(linalg::commutator_r(&s1, &s2) - linalg::commutator_r(&d1, &d2))) / sq;
    let t = st.tol.structure_rel;
    let holds = w_isotropic <= t
        && w_in_k <= t
        && s1_kills_k <= t
        && s2_preserves_k <= t
        && s2_preserves_w <= t
        && nilpotent_products <= t
        && s1_squared <= t
        && commutator_identity <= t;
    Ok(WKReport {
        w_dim: w.ncols(),
        k_dim: k.ncols(),
        w,
        k,
        w_isotropic,
        w_in_k,
        s1_kills_k,
        s2_preserves_k,
        s2_preserves_w,
        nilpotent_products,
        s1_squared,
        commutator_identity,
        holds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeCondition {
    pub holds: bool,
    /// Exact constant `sup |Im Q| / Re Q` when the condition holds.
    pub constant: Option<f64>,
    /// Lower bound from quasi-random sampling of unit vectors.
    pub sampled_lower_bound: f64,
    /// Real vector with `Re Q ≤ tol` and `|Im Q| > tol` when the condition fails.
    pub witness: Option<Vec<f64>>,
    pub witness_re_q: Option<f64>,
    pub witness_im_q: Option<f64>,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// `|Im Q(v)| ≤ C Re Q(v)` for all real `v`. Holds exactly when `Re M ⪰ 0` and
/// `Ker Re M ⊆ Ker Im M`; the constant is the largest generalized eigenvalue
/// of `Im M` relative to `Re M` on the range of `Re M`.
pub fn cone_condition(m: &CMat, tol: f64, samples: usize) -> ConeCondition {
    let d = m.nrows();
    let rm = linalg::sym_r(&linalg::re(m));
    let imm = linalg::sym_r(&linalg::im(m));
    let scale = linalg::fro(m).max(1.0);

    let mut lower: f64 = 0.0;
    for s in 1..=samples as u64 {
        let mut v: Vec<f64> = (0..d).map(|k| 2.0 * radical_inverse(s, PRIMES[k % PRIMES.len()]) - 1.0).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let r = linalg::bilinear_r(&v, &rm, &v);
        let i = linalg::bilinear_r(&v, &imm, &v);
        if r > tol {
            lower = lower.max(i.abs() / r);
        }
    }

    let (vals, vecs) = linalg::sym_eigen(&rm);
    let fail = |w: Vec<f64>| {
        let r = linalg::bilinear_r(&w, &rm, &w);
        let i = linalg::bilinear_r(&w, &imm, &w);
        ConeCondition {
            holds: false,
            constant: None,
            sampled_lower_bound: lower,
            witness: Some(w),
            witness_re_q: Some(r),
            witness_im_q: Some(i),
        }
    };
    if vals.first().copied().unwrap_or(0.0) < -tol * scale {
        let w: Vec<f64> = vecs.column(0).iter().copied().collect();
        return fail(w);
    }
    let cut = tol * scale;
    let kernel: Vec<usize> = (0..d).filter(|&k| vals[k] <= cut).collect();
    let range: Vec<usize> = (0..d).filter(|&k| vals[k] > cut).collect();
    for &k in &kernel {
        let kv: Vec<f64> = vecs.column(k).iter().copied().collect();
        let ik = &imm * vecs.column(k);
        let a = ik.norm();
        if a <= cut {
            continue;
        }
        let q = linalg::bilinear_r(&kv, &imm, &kv);
        if q.abs() > cut {
            return fail(kv);
        }
        // move off the kernel along Im M·k, where Im Q grows linearly and Re Q quadratically
        let r: Vec<f64> = ik.iter().map(|x| x / a).collect();
        let b = linalg::bilinear_r(&r, &rm, &r).max(f64::MIN_POSITIVE);
        let eps = (tol / (10.0 * b)).sqrt().min(1.0);
        let w: Vec<f64> = kv.iter().zip(&r).map(|(x, y)| x + eps * y).collect();
        return fail(w);
    }
    let constant = if range.is_empty() {
        0.0
    } else {
        let b = RMat::from_fn(d, range.len(), |r, c| vecs[(r, range[c])] / vals[range[c]].sqrt());
        let g = b.transpose() * &imm * &b;
        linalg::sym_eigenvalues(&g).iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    };
    ConeCondition {
        holds: true,
        constant: Some(constant),
        sampled_lower_bound: lower,
        witness: None,
        witness_re_q: None,
        witness_im_q: None,
    }
}
