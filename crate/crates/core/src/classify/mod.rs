//! Local-solvability decisions for `L_{S,α}` with a certificate naming the
//! theorem that applies, the hypotheses checked and the quantities used.
//!
//! The tree, in order: the (rotated) sign condition, the zero operator, the
//! non-real branch (all-α theorem, then the ν-strip, then the reduction to
//! the real part), the real-spectrum theorem with its diophantine case, the
//! nilpotent normal form, the two-dimensional family, and otherwise an
//! inconclusive verdict naming the first failed hypothesis.

pub mod diophantine;
pub mod family;
pub mod hormander;
pub mod normal_form;

pub use diophantine::{condition_2q, exceptional_set, snap_rational, ConditionQReport, ExceptionalSet, ExceptionalValue, QClass};
pub use family::{detect_family, family_symbol_check, FamilyMatch, SymbolCheck};
pub use hormander::{hormander_point_check, symbol, HormanderPoint};
pub use normal_form::{nilpotent_normal_form, NilpotentNormalForm};

use crate::linalg::{self, CMat, RMat};
use crate::operator::OperatorSpec;
use crate::spectral::{check_property_c, check_property_r, HamiltonStructure};
use crate::symplectic::{hamilton_from_a, standard_j_c};
use crate::tolerances::Tolerances;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Solvable,
    SolvableExceptUnknownExceptional,
    ExceptionalValueUnknown,
    NotSolvable,
    OutsidePaperScope,
    Inconclusive,
}

pub mod tags {
    pub const STRIP: &str = "Thm2.1(i)";
    pub const STRIP_REDUCTION: &str = "Thm2.1(ii)+Thm2.5";
    pub const REAL_I: &str = "Thm2.5(i)";
    pub const REAL_II: &str = "Thm2.5(ii)";
    pub const REAL_III: &str = "Thm2.5(iii)+2.q";
    pub const ALL_ALPHA: &str = "Thm2.7(i)";
    pub const ALL_BUT_EXCEPTIONAL: &str = "Thm2.7(ii)";
    pub const NILPOTENT: &str = "Prop7.B+constant-coefficients";
    pub const FAMILY: &str = "Prop7.C-family";
    pub const SOLVABLE: [&str; 9] =
        [STRIP, STRIP_REDUCTION, REAL_I, REAL_II, REAL_III, ALL_ALPHA, ALL_BUT_EXCEPTIONAL, NILPOTENT, FAMILY];
}

#[derive(Debug, Clone, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Quantities {
    pub nu: Option<f64>,
    pub strip_bound: Option<f64>,
    pub exceptional_sample: Option<ExceptionalSet>,
    pub exceptional_witness: Option<ExceptionalValue>,
    pub condition_2q: Option<ConditionQReport>,
    /// Angle θ with `Re(e^{iθ} Q_S) ⪰ 0`, when a rotation was needed.
    pub rotation_theta: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub reduced_cases: Option<Vec<ReducedCase>>,
    pub normal_form: Option<NilpotentNormalForm>,
    pub family: Option<FamilyMatch>,
    pub symbol_check: Option<SymbolCheck>,
}

/// One shifted central parameter in the reduction to the real part.
#[derive(Debug, Clone, Serialize)]
pub struct ReducedCase {
    pub beta: [f64; 2],
    pub tag: Option<String>,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub tag: Option<String>,
    pub hypotheses: Vec<Hypothesis>,
    pub quantities: Quantities,
    pub tolerances: Tolerances,
    pub k_max: usize,
    pub m_max: u32,
    pub theta_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub certificate: Certificate,
    pub trace: Vec<String>,
    pub flags: Vec<String>,
    /// Status valid for every central parameter, when the deciding theorem
    /// does not depend on α.
    pub all_alpha: Option<Status>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyOptions {
    pub k_max: usize,
    pub m_max: u32,
    pub exact: bool,
    /// Accept the ν-strip rule without property (R); valid only for the
    /// three-dimensional example where the strip is proved directly.
    pub strip_without_r: bool,
    pub theta_samples: usize,
    pub tol: Tolerances,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { k_max: 50, m_max: 10, exact: true, strip_without_r: false, theta_samples: 360, tol: Tolerances::default() }
    }
}

struct Builder {
    hyps: Vec<Hypothesis>,
    q: Quantities,
    trace: Vec<String>,
    flags: Vec<String>,
}

impl Builder {
    fn hyp(&mut self, name: &str, holds: bool, detail: impl Into<String>) -> bool {
        let detail = detail.into();
        self.trace.push(format!("{name}: {} {detail}", if holds { "yes" } else { "no" }).trim_end().to_string());
        self.hyps.push(Hypothesis { name: name.into(), holds, detail });
        holds
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.trace.push(msg.into());
    }

    fn finish(self, status: Status, tag: Option<&str>, all_alpha: Option<Status>, opts: &ClassifyOptions) -> Verdict {
        Verdict {
            status,
            certificate: Certificate {
                tag: tag.map(str::to_string),
                hypotheses: self.hyps,
                quantities: self.q,
                tolerances: opts.tol,
                k_max: opts.k_max,
                m_max: opts.m_max,
                theta_samples: opts.theta_samples,
            },
            trace: self.trace,
            flags: self.flags,
            all_alpha,
        }
    }
}

/// Smallest eigenvalue of `Re(e^{iθ} A)`.
fn rotated_min_eig(a: &CMat, theta: f64) -> f64 {
    let rot = a * C64::from_polar(1.0, theta);
    linalg::sym_eigenvalues(&linalg::re(&rot)).first().copied().unwrap_or(0.0)
}

/// Search for `θ` with `Re(e^{iθ} A) ⪰ 0` on a uniform grid, refined by
/// golden-section search around the best grid angle.
fn rotation_search(a: &CMat, samples: usize) -> (f64, f64) {
    let samples = samples.max(4);
    let h = 2.0 * PI / samples as f64;
    let (mut best_t, mut best_v) = (0.0, f64::NEG_INFINITY);
    for k in 0..samples {
        let t = k as f64 * h;
        let v = rotated_min_eig(a, t);
        if v > best_v {
            (best_t, best_v) = (t, v);
        }
    }
    let (mut lo, mut hi) = (best_t - h, best_t + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if rotated_min_eig(a, m1) < rotated_min_eig(a, m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let t = 0.5 * (lo + hi);
    let v = rotated_min_eig(a, t);
    if v > best_v {
        (best_t, best_v) = (t, v);
    }
    (best_t.rem_euclid(2.0 * PI), best_v)
}

/// Outcome of one theorem applied to `(S, α)`.
struct Decision {
    status: Status,
    tag: &'static str,
}

/// Signed frequencies of a form `Σ iλ_j(X_j² + Y_j²)`: for each positive
/// eigenvalue λ of `S`, the signature of `Im Q_S` on the real span of
/// `V_λ ⊕ V_{-λ}` gives the signs.
fn signed_frequencies(st: &HamiltonStructure) -> Option<Vec<f64>> {
    let j = standard_j_c(st.n);
    let form = linalg::im(&linalg::sym(&(&j * &st.s)));
    let mut out = Vec::new();
    for c in st.clusters.iter().filter(|c| c.is_real && c.lambda.re > 0.0) {
        let partner = st.clusters.iter().find(|o| o.is_real && (o.lambda.re + c.lambda.re).abs() < 1e-9 * st.scale.max(1.0))?;
        let p = &c.projector + &partner.projector;
        let span = linalg::real_span(&p, 1e-8, 1e-12);
        if span.ncols() != 2 * c.alg_mult {
            return None;
        }
        let restricted: RMat = span.transpose() * &form * &span;
        let ev = linalg::sym_eigenvalues(&linalg::sym_r(&restricted));
        let pos = ev.iter().filter(|&&x| x > 0.0).count();
        if pos % 2 != 0 || !(ev.len() - pos).is_multiple_of(2) {
            return None;
        }
        out.extend(std::iter::repeat_n(c.lambda.re, pos / 2));
        out.extend(std::iter::repeat_n(-c.lambda.re, (ev.len() - pos) / 2));
    }
    if out.len() != st.n {
        return None;
    }
    Some(out)
}

/// The real-spectrum theorem for `L_{S,α}`; `Err` names the failed hypothesis.
fn real_spectrum_rule(st: &HamiltonStructure, alpha: C64, opts: &ClassifyOptions, b: &mut Builder, label: &str) -> Result<Decision, String> {
    let pre = |s: &str| format!("{label}{s}");
    if !st.is_zero(&st.split.s_i) {
        b.hyp(&pre("real spectrum"), false, "");
        return Err(pre("real spectrum"));
    }
    let step = st.step(&st.jordan.n).map_err(|e| format!("{}: {e}", pre("N² = 0")))?;
    if !b.hyp(&pre("N² = 0"), step <= 2, format!("(nilpotency step {step})")) {
        return Err(pre("N² = 0"));
    }
    let c = check_property_c(&st.jordan.d, &st.tol);
    if !b.hyp(&pre("property (C)"), c.holds, format!("(residual {:.3e})", c.residual)) {
        return Err(pre("property (C)"));
    }
    let re_s_zero = linalg::fro_r(&linalg::re(&st.s)) <= st.zero_tol();
    let re_alpha_zero = alpha.re.abs() <= st.tol.structure_rel * (1.0 + alpha.norm());
    if !re_s_zero || !re_alpha_zero {
        b.hyp(&pre("Re S ≠ 0 or Re α ≠ 0"), true, "");
        return Ok(Decision { status: Status::Solvable, tag: tags::REAL_I });
    }
    if !st.is_zero(&st.jordan.n) {
        b.hyp(&pre("N ≠ 0"), true, "");
        return Ok(Decision { status: Status::Solvable, tag: tags::REAL_II });
    }
    let Some(lambdas) = signed_frequencies(st) else {
        b.hyp(&pre("reduction to Σ iλ_j(X_j² + Y_j²)"), false, "");
        return Err(pre("reduction to Σ iλ_j(X_j² + Y_j²)"));
    };
    b.note(format!("{}reduced to Σ iλ_j(X_j² + Y_j²) with λ = {lambdas:?}", label));
    let rep = condition_2q(C64::new(0.0, alpha.im), &lambdas, opts.k_max, opts.m_max, opts.exact);
    b.q.lambdas = Some(lambdas);
    let class = rep.classification;
    b.note(format!("{label}diophantine condition: {:?}, min distance {:.6e} over |k| ≤ {}", class, rep.min_distance, rep.k_max));
    b.q.condition_2q = Some(rep);
    match class {
        QClass::Plausible => {
            b.flags.push("bounded_diophantine_check".into());
            Ok(Decision { status: Status::Solvable, tag: tags::REAL_III })
        }
        QClass::Violated => Ok(Decision { status: Status::NotSolvable, tag: tags::REAL_III }),
        QClass::Inconclusive => Err(pre("diophantine condition (scan inconclusive)")),
    }
}

/// Classify `L = Σ a_jk V_jV_k + iαU`.
pub fn classify(spec: &OperatorSpec, opts: &ClassifyOptions) -> Verdict {
    let mut b = Builder { hyps: Vec::new(), q: Quantities::default(), trace: Vec::new(), flags: Vec::new() };
    let a_norm = linalg::fro(&spec.a);
    if a_norm == 0.0 {
        b.hyp("A = 0", true, "");
        if spec.alpha == C64::new(0.0, 0.0) {
            b.note("L = 0 is not solvable");
            return b.finish(Status::NotSolvable, None, None, opts);
        }
        b.note("L = iαU with α ≠ 0 is a nonzero constant-coefficient operator along the centre");
        return b.finish(Status::Solvable, Some(tags::NILPOTENT), None, opts);
    }
    let s0 = match hamilton_from_a(&spec.a) {
        Ok(s) => s,
        Err(e) => {
            b.note(format!("Hamilton map: {e}"));
            return b.finish(Status::Inconclusive, None, None, opts);
        }
    };
    let psd_tol = opts.tol.psd * linalg::fro(&s0).max(1.0);
    let mut spec = spec.clone();
    if !b.hyp("Re Q ⪰ 0", rotated_min_eig(&spec.a, 0.0) >= -psd_tol, "") {
        let (theta, v) = rotation_search(&spec.a, opts.theta_samples);
        if !b.hyp("Re(e^{iθ}Q) ⪰ 0 for some θ", v >= -psd_tol, format!("(best θ = {theta:.6}, min eigenvalue {v:.3e})")) {
            return b.finish(Status::OutsidePaperScope, None, None, opts);
        }
        let rot = C64::from_polar(1.0, theta);
        spec.a *= rot;
        spec.alpha *= rot;
        b.q.rotation_theta = Some(theta);
        b.flags.push("rotated_sign_condition".into());
    }
    let alpha = spec.alpha;
    let st = match HamiltonStructure::from_spec(&spec, &opts.tol) {
        Ok(st) => st,
        Err(e) => {
            b.note(format!("spectral structure unresolved: {e}"));
            return b.finish(Status::Inconclusive, None, None, opts);
        }
    };
    let omegas = st.omegas();
    let nu: f64 = omegas.iter().map(|w| w.im).sum::<f64>() + 0.0;
    b.q.nu = Some(nu);
    let mut failed: Vec<String> = Vec::new();

    if !st.is_zero(&st.split.s_i) {
        b.hyp("S_i ≠ 0", true, "");
        let r = check_property_r(&st);
        if !r.holds {
            b.flags.push("property_R=false".into());
        }
        b.hyp("property (R)", r.holds, "");
        let step_nr = st.step(&st.n_r());
        let nr2 = matches!(step_nr, Ok(k) if k <= 2);
        let re_dr = linalg::fro_r(&linalg::re(&st.d_r())) <= st.zero_tol();
        if r.holds
            && b.hyp("N_r² = 0", nr2, format!("({step_nr:?})"))
            && b.hyp("Re D_r = 0", re_dr, "(equivalent to (C) here)")
        {
            let sr_zero = st.is_zero(&st.split.s_r);
            if !sr_zero {
                b.hyp("S_r ≠ 0", true, "");
                return b.finish(Status::Solvable, Some(tags::ALL_ALPHA), Some(Status::Solvable), opts);
            }
            b.hyp("S_r ≠ 0", false, "");
            let set = exceptional_set(&omegas, alpha.norm() + 1.0);
            let witness = set.contains(alpha, 1e-9 * (1.0 + alpha.norm())).cloned();
            b.q.exceptional_sample = Some(set);
            if let Some(w) = witness {
                b.hyp("α ∉ ℰ_S", false, format!("(α = {}Σ(2k_j+1)iω_j with k = {:?})", if w.sign > 0 { "+" } else { "-" }, w.k));
                b.q.exceptional_witness = Some(w);
                return b.finish(Status::ExceptionalValueUnknown, None, Some(Status::SolvableExceptUnknownExceptional), opts);
            }
            b.hyp("α ∉ ℰ_S", true, "");
            return b.finish(Status::Solvable, Some(tags::ALL_BUT_EXCEPTIONAL), Some(Status::SolvableExceptUnknownExceptional), opts);
        }
        if !r.holds {
            failed.push("property (R)".into());
        } else if !nr2 {
            failed.push("N_r² = 0".into());
        } else {
            failed.push("Re D_r = 0".into());
        }

        let strip_ok = r.holds || opts.strip_without_r;
        if !r.holds && opts.strip_without_r {
            b.flags.push("R_waived".into());
            b.note("(R) waived: the ν-strip is proved directly for this example");
        }
        b.q.strip_bound = Some(nu);
        if strip_ok && b.hyp("|Re α| < ν", alpha.re.abs() < nu, format!("(|Re α| = {:.6}, ν = {nu:.6})", alpha.re.abs())) {
            return b.finish(Status::Solvable, Some(tags::STRIP), None, opts);
        }
        if r.holds {
            let bound = alpha.re.abs() + 1e-6 * (1.0 + nu);
            b.q.strip_bound = Some(bound);
            let shifts = exceptional_set(&omegas, bound);
            b.note(format!("reducing to the real part with {} shifted parameters (M = {bound:.6})", shifts.values.len() + 1));
            let st_r = HamiltonStructure::new(st.split.s_r.clone(), &opts.tol);
            let mut cases = Vec::new();
            let mut all = true;
            for beta in shifts.values.iter().map(|v| alpha + C64::new(v.value[0], v.value[1])) {
                let (status, tag) = if st.is_zero(&st.split.s_r) {
                    if beta.norm() > 1e-12 { (Status::Solvable, Some(tags::NILPOTENT.to_string())) } else { (Status::NotSolvable, None) }
                } else {
                    match &st_r {
                        Ok(sr) => match real_spectrum_rule(sr, beta, opts, &mut b, "S_r: ") {
                            Ok(d) => (d.status, Some(d.tag.to_string())),
                            Err(_) => (Status::Inconclusive, None),
                        },
                        Err(e) => {
                            b.note(format!("S_r structure: {e}"));
                            (Status::Inconclusive, None)
                        }
                    }
                };
                all &= status == Status::Solvable;
                cases.push(ReducedCase { beta: [beta.re, beta.im], tag, status });
            }
            b.q.exceptional_sample = Some(shifts);
            b.q.reduced_cases = Some(cases);
            if b.hyp("every shifted real-part operator resolved as solvable", all, "") {
                return b.finish(Status::Solvable, Some(tags::STRIP_REDUCTION), None, opts);
            }
            failed.push("reduction to the real part".into());
        } else if !opts.strip_without_r {
            failed.push("ν-strip needs property (R)".into());
        } else {
            failed.push("|Re α| < ν".into());
        }
    } else {
        b.hyp("S_i ≠ 0", false, "");
        b.hyp("S ≠ 0", true, "");
        match real_spectrum_rule(&st, alpha, opts, &mut b, "") {
            Ok(d) => return b.finish(d.status, Some(d.tag), None, opts),
            Err(f) => failed.push(f),
        }
    }

    let sq = linalg::fro(&(&st.s * &st.s)) / (st.scale * st.scale);
    if sq <= opts.tol.nilpotent_rel {
        b.hyp("S² = 0", true, "");
        match nilpotent_normal_form(&st.s, opts.tol.nilpotent_rel) {
            Ok(nf) if nf.block_residual <= 1e-9 && nf.symplectic_residual <= 1e-9 => {
                b.q.normal_form = Some(nf);
                return b.finish(Status::Solvable, Some(tags::NILPOTENT), None, opts);
            }
            Ok(nf) => {
                b.note(format!("normal form residuals too large ({:.3e}, {:.3e})", nf.block_residual, nf.symplectic_residual));
                failed.push("normal form residual".into());
            }
            Err(e) => failed.push(format!("normal form: {e}")),
        }
    }

    if st.n == 2 {
        if let Some(f) = detect_family(&st.s, &st.jordan.n, 1e-8) {
            b.note(format!("two-dimensional family with m = {:.6}, c1 = {:.6}, c2 = {:.6} (c1, c2 up to a rotation of the Y-plane)", f.m, f.c1, f.c2));
            let ok = b.hyp("0 < √(c1² + c2²) ≤ m", f.in_solvable_range, "");
            b.q.family = Some(f);
            if ok {
                b.flags.push("family_specific".into());
                return b.finish(Status::Solvable, Some(tags::FAMILY), Some(Status::Solvable), opts);
            }
            failed.push("family range 0 < √(c1² + c2²) ≤ m".into());
        }
    }

    b.note(format!("no rule applies; failed: {}", failed.join("; ")));
    b.flags.extend(failed.iter().map(|f| format!("failed: {f}")));
    b.finish(Status::Inconclusive, None, None, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn run(spec: OperatorSpec) -> Verdict {
        classify(&spec, &ClassifyOptions::default())
    }

    #[test]
    fn sublaplacian_is_all_but_exceptional() {
        let v = run(fixtures::sublaplacian_n1().with_alpha(C64::new(0.5, 0.0)));
        assert_eq!(v.status, Status::Solvable);
        assert_eq!(v.certificate.tag.as_deref(), Some(tags::ALL_BUT_EXCEPTIONAL));
        let v = run(fixtures::sublaplacian_n1().with_alpha(C64::new(3.0, 0.0)));
        assert_eq!(v.status, Status::ExceptionalValueUnknown);
        assert_eq!(v.certificate.quantities.exceptional_witness.unwrap().k, vec![1]);
    }

    #[test]
    fn zero_operator() {
        let z = OperatorSpec::new(1, CMat::zeros(2, 2), C64::new(0.0, 0.0)).unwrap();
        assert_eq!(run(z.clone()).status, Status::NotSolvable);
        assert_eq!(run(z.with_alpha(C64::new(1.0, 0.0))).status, Status::Solvable);
    }

    #[test]
    fn negated_operator_uses_rotation() {
        let mut spec = fixtures::sublaplacian_n1().with_alpha(C64::new(0.5, 0.0));
        spec.a *= C64::new(-1.0, 0.0);
        let v = run(spec);
        assert_eq!(v.status, Status::Solvable);
        assert!((v.certificate.quantities.rotation_theta.unwrap() - PI).abs() < 1e-6);
    }

    #[test]
    fn real_hyperbolic_form_rotates_into_scope() {
        let spec = OperatorSpec::from_expr("X1^2 - Y1^2", 1).unwrap();
        assert_ne!(run(spec).status, Status::OutsidePaperScope);
    }

    #[test]
    fn cube_roots_of_unity_are_out_of_scope() {
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), w, w * w, C64::new(1.0, 0.0)]));
        let spec = OperatorSpec::new(2, a, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(run(spec).status, Status::OutsidePaperScope);
    }

    #[test]
    fn solvable_tags_are_listed() {
        for name in fixtures::NAMES {
            let spec = fixtures::by_name(name, &Default::default()).unwrap();
            let v = run(spec);
            if v.status == Status::Solvable {
                assert!(tags::SOLVABLE.contains(&v.certificate.tag.as_deref().unwrap()), "{name}");
            }
        }
    }
}
