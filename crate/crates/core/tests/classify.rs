use heisolv_core::classify::*;
use heisolv_core::linalg::{self, CMat};
use heisolv_core::spectral::HamiltonStructure;
use heisolv_core::symplectic::{conjugate_a, random_real_symplectic};
use heisolv_core::{fixtures, OperatorSpec, Tolerances, C64};

fn verdict(spec: OperatorSpec) -> Verdict {
    classify(&spec, &ClassifyOptions::default())
}

fn tag(v: &Verdict) -> Option<&str> {
    v.certificate.tag.as_deref()
}

#[test]
fn cone_failure_example_is_solvable_for_every_alpha() {
    for k in 0..10 {
        let alpha = C64::new(-3.0 + 0.7 * k as f64, 0.4 * k as f64 - 1.0);
        let v = verdict(fixtures::example_4_1().with_alpha(alpha));
        assert_eq!(v.status, Status::Solvable);
        assert_eq!(tag(&v), Some("Thm2.7(i)"));
        assert_eq!(v.all_alpha, Some(Status::Solvable));
    }
}

#[test]
fn harmonic_form_hits_diophantine_zero_at_k1() {
    let spec = OperatorSpec::from_expr("i*(X1^2+Y1^2)", 1).unwrap().with_alpha(C64::new(0.0, 3.0));
    let v = verdict(spec);
    assert_eq!(v.status, Status::NotSolvable);
    let q = v.certificate.quantities.condition_2q.as_ref().unwrap();
    assert_eq!(q.classification, QClass::Violated);
    assert!(q.zero_witnesses.iter().any(|w| w.0 == vec![1]));
    assert!(q.exact);
}

#[test]
fn harmonic_form_away_from_odd_values_is_solvable() {
    let spec = OperatorSpec::from_expr("i*(X1^2+Y1^2)", 1).unwrap().with_alpha(C64::new(0.0, 2.0));
    let v = verdict(spec);
    assert_eq!(v.status, Status::Solvable);
    assert_eq!(tag(&v), Some("Thm2.5(iii)+2.q"));
    assert!(v.flags.iter().any(|f| f == "bounded_diophantine_check"));
    let q = v.certificate.quantities.condition_2q.as_ref().unwrap();
    assert!((q.min_distance - 1.0).abs() < 1e-9);
}

#[test]
fn strip_rule_for_the_three_dimensional_example() {
    let spec = fixtures::example_2_3().with_alpha(C64::new(0.5, 0.0));
    let opts = ClassifyOptions { strip_without_r: true, ..Default::default() };
    let v = classify(&spec, &opts);
    assert_eq!(v.status, Status::Solvable);
    assert_eq!(tag(&v), Some("Thm2.1(i)"));
    assert!(v.flags.iter().any(|f| f == "property_R=false"));
    assert!(v.flags.iter().any(|f| f == "R_waived"));
    assert!((v.certificate.quantities.nu.unwrap() - 1.0).abs() < 1e-9);
    assert!(v.trace.iter().any(|t| t.contains("(R) waived")));

    // Without the waiver nothing applies, and the verdict says why.
    let v = verdict(fixtures::example_2_3().with_alpha(C64::new(0.5, 0.0)));
    assert_eq!(v.status, Status::Inconclusive);
    assert!(v.flags.iter().any(|f| f.contains("property (R)")));
}

#[test]
fn family_example_is_recognised() {
    let v = verdict(fixtures::example_2_6(5.0, 3.0, 4.0).with_alpha(C64::new(1.0, 2.0)));
    assert_eq!(v.status, Status::Solvable);
    assert_eq!(tag(&v), Some("Prop7.C-family"));
    let f = v.certificate.quantities.family.as_ref().unwrap();
    assert!((f.m - 5.0).abs() < 1e-8 && (f.c1.hypot(f.c2) - 5.0).abs() < 1e-8);
    // Outside the range the family rule does not fire.
    let v = verdict(fixtures::example_2_6(1.0, 3.0, 4.0).with_alpha(C64::new(1.0, 2.0)));
    assert_ne!(tag(&v), Some("Prop7.C-family"));
}

#[test]
fn family_survives_symplectic_change_of_basis_and_scaling() {
    let base = fixtures::example_2_6(6.0, 3.0, 4.0);
    for seed in 0..5 {
        let t = random_real_symplectic(2, seed);
        let a = conjugate_a(&base.a, &t) * C64::new(2.5, 0.0);
        let spec = OperatorSpec::new(2, a, C64::new(0.3, 1.0)).unwrap();
        let v = verdict(spec);
        assert_eq!(tag(&v), Some("Prop7.C-family"), "seed {seed}: {:?}", v.trace);
    }
}

#[test]
fn exceptional_values_of_sublaplacian() {
    let v = verdict(fixtures::sublaplacian_n1().with_alpha(C64::new(3.0, 0.0)));
    assert_eq!(v.status, Status::ExceptionalValueUnknown);
    assert_eq!(v.all_alpha, Some(Status::SolvableExceptUnknownExceptional));
    let v = verdict(fixtures::sublaplacian_n1().with_alpha(C64::new(2.0, 0.0)));
    assert_eq!(v.status, Status::Solvable);
    assert_eq!(tag(&v), Some("Thm2.7(ii)"));
}

#[test]
fn reduction_to_real_part_is_reported_when_unresolved() {
    let v = verdict(fixtures::example_2_4(1.0).with_alpha(C64::new(2.0, 0.0)));
    assert_eq!(v.status, Status::Inconclusive);
    let cases = v.certificate.quantities.reduced_cases.as_ref().unwrap();
    assert!(!cases.is_empty());
    assert!(v.flags.iter().any(|f| f.contains("reduction to the real part")));
    // Inside the strip the same operator is solvable.
    let v = verdict(fixtures::example_2_4(1.0).with_alpha(C64::new(0.3, 0.0)));
    assert_eq!(tag(&v), Some("Thm2.1(i)"));
}

fn real_part_maps(spec: &OperatorSpec, use_nonreal: bool) -> (heisolv_core::linalg::RMat, heisolv_core::linalg::RMat) {
    let st = HamiltonStructure::from_spec(spec, &Tolerances::default()).unwrap();
    let m = if use_nonreal { &st.split.s_i } else { &st.split.s_r };
    (linalg::re(m), linalg::im(m))
}

#[test]
fn hormander_points_of_the_three_dimensional_example() {
    let spec = fixtures::example_2_3();
    let (s1, s2) = real_part_maps(&spec, false);
    let r = hormander_point_check(&s1, &s2, &[1., 1., 1., -1., -1., -1.]);
    assert!(r.exact && r.satisfies_h_at_point, "{r:?}");
    let (s1, s2) = real_part_maps(&spec, true);
    let r = hormander_point_check(&s1, &s2, &[0., 0., 1., 0., 1., 0.]);
    assert!(r.exact && r.satisfies_h_at_point, "{r:?}");
}

#[test]
fn hormander_point_of_the_nilpotent_example() {
    for b in [1.0, 2.0, -0.5] {
        let st = HamiltonStructure::from_spec(&fixtures::example_2_4(b), &Tolerances::default()).unwrap();
        // Real part, computed exactly by hand from S - S·(S⁴ restricted):
        // -b²X1² + (b²+1)X2² - 2bX1X3 + 2iX1Y2. The displayed decomposition
        // carries +b²X1², which does not add up to L_S with the displayed L_{S_i}.
        let want = OperatorSpec::from_expr(&format!("-({b:?})^2 X1^2 + (({b:?})^2+1)X2^2 - 2({b:?})X1X3 + 2i X1Y2"), 3).unwrap();
        let got = heisolv_core::symplectic::a_from_hamilton(&st.split.s_r);
        assert!(linalg::fro(&(&got - &want.a)) < 1e-9);
        let (s1, s2) = (linalg::re(&st.split.s_r), linalg::im(&st.split.s_r));
        let displayed = hormander_point_check(&s1, &s2, &[1., 1., (2.0 * b * b + 1.0) / (2.0 * b), 0., 0., 0.]);
        assert!(!displayed.satisfies_h_at_point);
        assert!((displayed.p1 + 2.0 * b * b).abs() < 1e-9);
        let r = hormander_point_check(&s1, &s2, &[1., 1., 1.0 / (2.0 * b), 0., 0., 0.]);
        assert!(r.satisfies_h_at_point, "b = {b}: {r:?}");
    }
}

#[test]
fn normal_form_of_real_nilpotent_block() {
    // The real part of the cone-failure example is the single square X1².
    let (s1, _) = real_part_maps(&fixtures::example_4_1(), false);
    let nf = nilpotent_normal_form(&linalg::to_complex(&s1), 1e-8).unwrap();
    assert_eq!(nf.m, 1);
    assert!((nf.b[0][0][0] - 1.0).abs() < 1e-9 && nf.b[0][0][1].abs() < 1e-12);
    assert!(nf.block_residual < 1e-9 && nf.symplectic_residual < 1e-9);
}

#[test]
fn normal_form_is_stable_under_conjugation() {
    let spec = OperatorSpec::from_expr("Y1^2 + 3Y2^2 + 2i Y1Y2", 2).unwrap();
    let base = heisolv_core::symplectic::hamilton_from_a(&spec.a).unwrap();
    let nf0 = nilpotent_normal_form(&base, 1e-8).unwrap();
    assert_eq!(nf0.m, 2);
    let det = |b: &Vec<Vec<[f64; 2]>>| {
        let m = CMat::from_fn(2, 2, |r, c| C64::new(b[r][c][0], b[r][c][1]));
        (linalg::det(&m), m.trace())
    };
    for seed in 0..5 {
        let t = random_real_symplectic(2, seed);
        let a = conjugate_a(&spec.a, &t);
        let s = heisolv_core::symplectic::hamilton_from_a(&a).unwrap();
        let nf = nilpotent_normal_form(&s, 1e-8).unwrap();
        assert_eq!(nf.m, 2);
        assert!(nf.block_residual < 1e-9, "{}", nf.block_residual);
        assert!(nf.symplectic_residual < 1e-9);
        // B is congruent to the original: Re B keeps its (positive) signature.
        let (d, tr) = det(&nf.b);
        assert!(d.norm() > 1e-6 && tr.re > 0.0);
    }
    let v = verdict(spec.with_alpha(C64::new(0.0, 1.0)));
    assert_eq!(v.status, Status::Solvable);
}

#[test]
fn exceptional_enumeration_matches_brute_force() {
    let omegas = [C64::new(0.3, 1.0), C64::new(-0.2, 1.7)];
    let set = exceptional_set(&omegas, 20.0);
    let mut brute = Vec::new();
    for k1 in 0..20 {
        for k2 in 0..20 {
            let w = (2 * k1 + 1) as f64 * 1.0 + (2 * k2 + 1) as f64 * 1.7;
            if w <= 20.0 {
                let z = C64::new(0.0, (2 * k1 + 1) as f64) * omegas[0] + C64::new(0.0, (2 * k2 + 1) as f64) * omegas[1];
                brute.push(z);
                brute.push(-z);
            }
        }
    }
    assert_eq!(set.values.len(), brute.len());
    for z in brute {
        assert!(set.contains(z, 1e-12).is_some());
    }
    for v in &set.values {
        assert!(set.contains(C64::new(-v.value[0], -v.value[1]), 1e-12).is_some());
    }
}

#[test]
fn diophantine_examples() {
    let r = condition_2q(C64::new(0., 2.), &[1., 1.], 50, 10, true);
    assert_eq!(r.classification, QClass::Violated);
    assert!(r.zero_witnesses.contains(&(vec![0, 0], -1)));
    let r = condition_2q(C64::new(0., 1.), &[1., 1.], 50, 10, true);
    assert_eq!(r.classification, QClass::Plausible);
    assert_eq!(r.fitted_m, Some(0));
    let r = condition_2q(C64::new(0., 1.), &[1., 2f64.sqrt()], 50, 10, true);
    assert!(!r.exact && r.zero_witnesses.is_empty());
    // Floating mode agrees with exact mode on rational data.
    let r = condition_2q(C64::new(0., 3.), &[0.5, 1.5], 30, 10, false);
    assert_eq!(r.classification, QClass::Violated);
}

#[test]
fn symbol_check_of_the_family() {
    let r = family_symbol_check(5.0, 3.0, 4.0, C64::new(1.0, 0.0), 360);
    assert!(r.q_min.abs() < 1e-12 && r.q_nonneg);
    assert!((r.q_period_value - 2.0 * std::f64::consts::PI * 5.0).abs() < 1e-12);
    assert!(r.stable && r.sup_fine.is_finite());
    let r = family_symbol_check(6.0, 3.0, 4.0, C64::new(1.0, 1.0), 360);
    assert_eq!(r.branch, "b_not_even");
    assert!(r.q_min > 0.9 && r.stable, "{r:?}");
}

#[test]
fn verdict_serialises() {
    let v = verdict(fixtures::example_4_1().with_alpha(C64::new(0.3, 0.0)));
    let json = serde_json::to_value(&v).unwrap();
    assert_eq!(json["status"], "Solvable");
    assert_eq!(json["certificate"]["tag"], "Thm2.7(i)");
}
