use heisolv_core::fixtures;
use heisolv_core::linalg::{self, c, CMat};
use heisolv_core::spectral::{
    check_property_c, check_property_r, check_re_q_sr, compute_w_k, prop3a_checks, structural_report, HamiltonStructure,
};
use heisolv_core::symplectic::{hamilton_from_a, re_q_psd, standard_j_c};
use heisolv_core::{OperatorSpec, Tolerances, C64};

fn structure(spec: &OperatorSpec) -> HamiltonStructure {
    HamiltonStructure::from_spec(spec, &Tolerances::default()).unwrap()
}

fn spectrum(st: &HamiltonStructure) -> Vec<(C64, usize)> {
    st.clusters.iter().map(|c| (c.lambda, c.alg_mult)).collect()
}

fn has(spec: &[(C64, usize)], lambda: C64, mult: usize) -> bool {
    spec.iter().any(|(l, m)| (l - lambda).norm() < 1e-9 && *m == mult)
}

/// Displayed blocks: D = [[iJ, 0], [C, iJ]], N = [[0, 0], [mI, 0]].
fn example_2_6_blocks(m: f64, c1: f64, c2: f64) -> (CMat, CMat) {
    let z = c(0., 0.);
    let i = c(0., 1.);
    let d = CMat::from_row_slice(
        4,
        4,
        &[z, i, z, z, -i, z, z, z, c(c1, 0.), c(c2, 0.), z, i, c(c2, 0.), c(-c1, 0.), -i, z],
    );
    let mut n = CMat::zeros(4, 4);
    n[(2, 0)] = c(m, 0.);
    n[(3, 1)] = c(m, 0.);
    (d, n)
}

#[test]
fn example_2_6_hamilton_map_is_displayed_d_plus_n() {
    let spec = fixtures::example_2_6(5.0, 3.0, 4.0);
    let s = hamilton_from_a(&spec.a).unwrap();
    let (d, n) = example_2_6_blocks(5.0, 3.0, 4.0);
    assert!(linalg::fro(&(&s - (&d + &n))) < 1e-14);
}

#[test]
fn example_2_6_jordan_pair_matches_display() {
    let (m, c1, c2) = (5.0, 3.0, 4.0);
    let st = structure(&fixtures::example_2_6(m, c1, c2));
    let sp = spectrum(&st);
    assert_eq!(sp.len(), 2);
    assert!(has(&sp, c(1., 0.), 2) && has(&sp, c(-1., 0.), 2));
    let (d, n) = example_2_6_blocks(m, c1, c2);
    assert!(linalg::fro(&(&st.jordan.d - &d)) < 1e-9);
    assert!(linalg::fro(&(&st.jordan.n - &n)) < 1e-9);
    assert!(linalg::fro(&(&st.jordan.d * &st.jordan.d - linalg::identity(4))) < 1e-9);
    assert_eq!(st.step(&st.jordan.n).unwrap(), 2);
    assert!(!check_property_c(&st.jordan.d, &st.tol).holds);
}

#[test]
fn example_2_6_kernel_and_w_k_identities() {
    let st = structure(&fixtures::example_2_6(5.0, 3.0, 4.0));
    let p = prop3a_checks(&st).unwrap();
    assert!(p.holds, "{p:?}");
    assert!(p.rows.iter().all(|r| r.conj_kernel_distance < 1e-9 && r.s1_kernel_residual < 1e-9));
    let wk = compute_w_k(&st).unwrap();
    assert!(wk.holds, "{wk:?}");
    assert_eq!(wk.w_dim, 2);
    assert_eq!(wk.k_dim, 2);
    assert!(wk.s1_squared < 1e-12 && wk.commutator_identity < 1e-9);
}

#[test]
fn example_2_6_psd_boundary() {
    let on = hamilton_from_a(&fixtures::example_2_6(5.0, 3.0, 4.0).a).unwrap();
    let off = hamilton_from_a(&fixtures::example_2_6(4.99, 3.0, 4.0).a).unwrap();
    assert!(re_q_psd(&on, 1e-9).psd);
    let r = re_q_psd(&off, 1e-9);
    assert!(!r.psd);
    // eigenvalue oracle: the Y-block of Re A has eigenvalues m ± √(c1² + c2²)
    assert!((r.min_eig - (4.99 - 5.0)).abs() < 1e-12);
}

#[test]
fn minus_j_structure() {
    let st = structure(&fixtures::sublaplacian_n1());
    let sp = spectrum(&st);
    assert!(has(&sp, c(0., 1.), 1) && has(&sp, c(0., -1.), 1));
    assert!(linalg::fro(&st.jordan.n) < 1e-12);
    assert!(linalg::fro(&(&st.jordan.d + standard_j_c(1))) < 1e-12);
    let (_, r) = structural_report(&fixtures::sublaplacian_n1(), &Tolerances::default()).unwrap();
    assert!((r.nu - 1.0).abs() < 1e-12);
    assert!(r.property_r.witnesses.is_empty() && r.property_r.holds);
    assert_eq!(r.cone_condition.constant, Some(0.0));
}

#[test]
fn example_2_3_structure() {
    let spec = fixtures::example_2_3();
    let st = structure(&spec);
    let sp = spectrum(&st);
    assert!(has(&sp, c(1., 0.), 2) && has(&sp, c(-1., 0.), 2));
    assert!(has(&sp, c(0., 1.), 1) && has(&sp, c(0., -1.), 1));
    assert!(st.re_q.psd);
    assert!(!check_property_r(&st).holds);
    let sr = check_re_q_sr(&st).unwrap();
    assert!(!sr.holds);
    assert_eq!(st.step(&st.n_r()).unwrap(), 2);
    let (_, r) = structural_report(&spec, &Tolerances::default()).unwrap();
    assert!((r.nu - 1.0).abs() < 1e-9);
    assert!((r.nu_min.unwrap() - 1.0).abs() < 1e-9);
    assert!(!r.re_q_si.psd);
}

#[test]
fn example_2_3_split_matches_displayed_parts() {
    // L_{S_r} = Y1² + Y2² + 2X3Y1 + 2i(X1Y2 - X2Y1), L_{S_i} = X3² + Y3² - Y2² - 2iY2Y3
    let st = structure(&fixtures::example_2_3());
    let want_r = OperatorSpec::from_expr("Y1^2 + Y2^2 + 2X3Y1 + 2i(X1Y2 - X2Y1)", 3).unwrap();
    let want_i = OperatorSpec::from_expr("X3^2 + Y3^2 - Y2^2 - 2iY2Y3", 3).unwrap();
    let s_r = hamilton_from_a(&want_r.a).unwrap();
    let s_i = hamilton_from_a(&want_i.a).unwrap();
    assert!(linalg::fro(&(&st.split.s_r - s_r)) < 1e-9);
    assert!(linalg::fro(&(&st.split.s_i - s_i)) < 1e-9);
}

#[test]
fn example_2_4_structure() {
    let st = structure(&fixtures::example_2_4(1.0));
    let sp = spectrum(&st);
    assert!(has(&sp, c(0., 0.), 4));
    assert!(has(&sp, c(0., 1.), 1) && has(&sp, c(0., -1.), 1));
    // S_r = N_r, 4-step nilpotent
    assert!(linalg::fro(&(&st.split.s_r - st.n_r())) < 1e-9);
    assert_eq!(st.step(&st.split.s_r).unwrap(), 4);
    assert!(check_property_r(&st).holds);
    assert!(!check_re_q_sr(&st).unwrap().holds);
}

#[test]
fn example_2_4_hamilton_map_matches_display() {
    let b = 2.0;
    let s = hamilton_from_a(&fixtures::example_2_4(b).a).unwrap();
    let z = c(0., 0.);
    let i = c(0., 1.);
    let one = c(1., 0.);
    let ib = c(0., b);
    let want = CMat::from_row_slice(
        6,
        6,
        &[
            z, i, z, z, z, z, //
            z, z, ib, z, -one, z, //
            z, z, z, z, z, -one, //
            z, z, z, z, z, z, //
            z, z, z, -i, z, z, //
            z, z, one, z, -ib, z,
        ],
    );
    assert_eq!(s, want);
}

#[test]
fn example_4_1_structure() {
    let spec = fixtures::example_4_1();
    let st = structure(&spec);
    let sp = spectrum(&st);
    assert!(has(&sp, c(0., 0.), 2));
    assert!(has(&sp, c(0., 1.), 1) && has(&sp, c(0., -1.), 1));
    let nr = st.n_r();
    assert!(linalg::fro(&(&st.split.s_r - &nr)) < 1e-9);
    assert!(linalg::fro(&nr) > 0.1);
    assert!(linalg::fro(&(&nr * &nr)) < 1e-9);
    assert!(check_re_q_sr(&st).unwrap().holds);
    let p = prop3a_checks(&st).unwrap();
    assert!(p.rows.iter().all(|r| r.s1_kernel_residual < 1e-9));
    let (_, r) = structural_report(&spec, &Tolerances::default()).unwrap();
    let cone = &r.cone_condition;
    assert!(!cone.holds);
    let w = cone.witness.as_ref().unwrap();
    assert!(!w.is_empty());
    assert!(cone.witness_re_q.unwrap() <= 1e-9 && cone.witness_im_q.unwrap().abs() > 1e-9);
}

#[test]
fn real_matrix_has_property_r() {
    // real S with real spectrum ±2, ±1
    let spec = OperatorSpec::from_expr("2X1Y1 + X2Y2", 2).unwrap();
    let st = structure(&spec);
    assert!(check_property_r(&st).holds);
    assert!(linalg::fro(&st.split.s_i) < 1e-12);
}
