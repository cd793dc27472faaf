use super::predicates::{
    check_property_c, check_property_r, check_re_q_sr, compute_w_k, cone_condition, prop3a_checks, ConeCondition,
    Prop3A, PropertyC, PropertyR, ReQSr, WKReport,
};
use super::{jordan_pair, nilpotency_step, spectrum_clusters, split_real_nonreal, JordanPair, SpectrumCluster, SplitDecomposition};
use crate::error::Result;
use crate::linalg::{self, CMat};
use crate::operator::OperatorSpec;
use crate::symplectic::{hamilton_from_a, re_form_psd, re_q_psd, standard_j_c, PsdResult};
use crate::tolerances::Tolerances;
use num_complex::Complex64 as C64;
use serde::Serialize;

/// A Hamilton map together with its clusters, split and Jordan pair.
#[derive(Debug, Clone)]
pub struct HamiltonStructure {
    pub n: usize,
    pub s: CMat,
    /// Frobenius norm of `S`.
    pub scale: f64,
    pub clusters: Vec<SpectrumCluster>,
    pub split: SplitDecomposition,
    pub jordan: JordanPair,
    pub re_q: PsdResult,
    pub tol: Tolerances,
}

impl HamiltonStructure {
    pub fn new(s: CMat, tol: &Tolerances) -> Result<Self> {
        let n = s.nrows() / 2;
        let scale = linalg::fro(&s);
        let clusters = spectrum_clusters(&s, tol)?;
        let split = split_real_nonreal(&s, &clusters)?;
        let jordan = jordan_pair(&s, &clusters);
        let re_q = re_q_psd(&s, tol.psd * scale.max(1.0));
        Ok(HamiltonStructure { n, s, scale, clusters, split, jordan, re_q, tol: *tol })
    }

    pub fn from_spec(spec: &OperatorSpec, tol: &Tolerances) -> Result<Self> {
        Self::new(hamilton_from_a(&spec.a)?, tol)
    }

    pub fn psd_tol(&self) -> f64 {
        self.tol.psd * self.scale.max(1.0)
    }

    /// Threshold below which a matrix built from `S` counts as zero.
    pub fn zero_tol(&self) -> f64 {
        self.tol.structure_rel * self.scale.max(f64::MIN_POSITIVE)
    }

    pub fn is_zero(&self, m: &CMat) -> bool {
        linalg::fro(m) <= self.zero_tol()
    }

    /// Projector onto the real generalized eigenspaces.
    pub fn p_r(&self) -> &CMat {
        &self.split.p_r
    }

    pub fn n_r(&self) -> CMat {
        &self.jordan.n * &self.split.p_r
    }

    pub fn d_r(&self) -> CMat {
        &self.jordan.d * &self.split.p_r
    }

    /// Non-real eigenvalues with positive imaginary part, with multiplicity.
    pub fn omegas(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for c in self.clusters.iter().filter(|c| !c.is_real && c.lambda.im > 0.0) {
            for _ in 0..c.alg_mult {
                out.push(c.lambda);
            }
        }
        out
    }

    /// Nilpotency step of a matrix derived from `S`.
    pub fn step(&self, m: &CMat) -> Result<usize> {
        nilpotency_step(m, self.tol.nilpotent_rel, self.scale)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterSummary {
    pub lambda: [f64; 2],
    pub multiplicity: usize,
    pub real: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructuralReport {
    pub n: usize,
    pub spectrum: Vec<ClusterSummary>,
    /// Representatives `ω_j` (Im ω_j > 0) of the non-real spectrum.
    pub omegas: Vec<[f64; 2]>,
    pub nu_list: Vec<f64>,
    pub nu: f64,
    pub nu_min: Option<f64>,
    pub re_q_psd: PsdResult,
    pub property_r: PropertyR,
    pub property_c: PropertyC,
    pub re_q_sr: Option<ReQSr>,
    pub re_q_si: PsdResult,
    pub cone_condition: ConeCondition,
    pub nilpotency_step_n: Option<usize>,
    pub nilpotency_step_nr: Option<usize>,
    pub s_r_zero: bool,
    pub s_i_zero: bool,
    pub prop3a: Option<Prop3A>,
    pub w_k: Option<WKReport>,
    pub w_dim: Option<usize>,
    pub k_dim: Option<usize>,
    /// Checks that could not be decided, with the reason.
    pub notes: Vec<String>,
}

const CONE_SAMPLES: usize = 4096;

/// Run every structural predicate. Fails only when the spectral structure
/// itself cannot be resolved; undecidable predicates become notes.
pub fn structural_report(spec: &OperatorSpec, tol: &Tolerances) -> Result<(HamiltonStructure, StructuralReport)> {
    let st = HamiltonStructure::from_spec(spec, tol)?;
    let report = report_for(&st);
    Ok((st, report))
}

pub(crate) fn report_for(st: &HamiltonStructure) -> StructuralReport {
    let mut notes = Vec::new();
    let spectrum = st
        .clusters
        .iter()
        .map(|c| ClusterSummary { lambda: [c.lambda.re, c.lambda.im], multiplicity: c.alg_mult, real: c.is_real })
        .collect();
    let omegas = st.omegas();
    let nu_list: Vec<f64> = omegas.iter().map(|w| w.im).collect();
    let nu = nu_list.iter().sum();
    let nu_min = nu_list.iter().copied().reduce(f64::min);
    let j = standard_j_c(st.n);
    let re_q_sr = match check_re_q_sr(st) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("Re Q_Sr: {e}"));
            None
        }
    };
    let re_q_si = re_form_psd(&linalg::sym(&(&j * &st.split.s_i)), st.psd_tol());
    let m = linalg::sym(&(&j * &st.s));
    let cone = cone_condition(&m, st.tol.psd, CONE_SAMPLES);
    let step = |m: &CMat, what: &str, notes: &mut Vec<String>| match st.step(m) {
        Ok(k) => Some(k),
        Err(e) => {
            notes.push(format!("nilpotency step of {what}: {e}"));
            None
        }
    };
    let nilpotency_step_n = step(&st.jordan.n, "N", &mut notes);
    let nilpotency_step_nr = step(&st.n_r(), "N_r", &mut notes);
    let prop3a = if st.re_q.psd { prop3a_checks(st).ok() } else { None };
    let w_k = match compute_w_k(st) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("W/K: {e}"));
            None
        }
    };
    StructuralReport {
        n: st.n,
        spectrum,
        omegas: omegas.iter().map(|w| [w.re, w.im]).collect(),
        nu_list,
        nu,
        nu_min,
        re_q_psd: st.re_q,
        property_r: check_property_r(st),
        property_c: check_property_c(&st.jordan.d, &st.tol),
        re_q_sr,
        re_q_si,
        cone_condition: cone,
        nilpotency_step_n,
        nilpotency_step_nr,
        s_r_zero: st.is_zero(&st.split.s_r),
        s_i_zero: st.is_zero(&st.split.s_i),
        prop3a,
        w_dim: w_k.as_ref().map(|w| w.w_dim),
        k_dim: w_k.as_ref().map(|w| w.k_dim),
        w_k,
        notes,
    }
}
