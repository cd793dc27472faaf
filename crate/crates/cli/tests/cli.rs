use heisolv_core::report::compare_documents;
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn heisolv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heisolv")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = heisolv(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn golden(name: &str) -> Value {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

// Free-text fields carry rounded numbers and the version string; the
// structured fields hold the same information.
fn strip_volatile(mut v: Value) -> Value {
    let o = v.as_object_mut().unwrap();
    o.remove("tool_version");
    o["verdict"].as_object_mut().unwrap().remove("trace");
    v
}

fn assert_matches_golden(args: &[&str], file: &str) -> Value {
    let actual = json(args);
    let diffs = compare_documents(&strip_volatile(golden(file)), &strip_volatile(actual.clone()), 1e-6, 1e-9);
    assert!(diffs.is_empty(), "{file}: {diffs:#?}");
    actual
}

#[test]
fn all_alpha_example_matches_golden() {
    let doc = assert_matches_golden(&["analyze", "--fixture", "example_4_1", "--alpha", "0.3"], "example_4_1_alpha_0.3.json");
    assert_eq!(doc["verdict"]["certificate"]["tag"], "Thm2.7(i)");
    assert_eq!(doc["verdict"]["status"], "Solvable");
}

#[test]
fn harmonic_oscillator_at_3i_has_violation_witness() {
    let doc = assert_matches_golden(&["analyze", "--expr", "i*(X1^2+Y1^2)", "--alpha", "3i"], "harmonic_alpha_3i.json");
    let q = &doc["verdict"]["certificate"]["quantities"]["condition_2q"];
    assert_eq!(doc["verdict"]["status"], "NotSolvable");
    assert_eq!(q["classification"], "violated");
    assert_eq!(q["exact"], true);
    assert_eq!(q["zero_witnesses"][0][0], serde_json::json!([1]));
}

#[test]
fn two_dimensional_family_matches_golden() {
    let doc = assert_matches_golden(
        &["analyze", "--fixture", "example_2_6", "--m", "5", "--c1", "3", "--c2", "4", "--alpha", "1+2i"],
        "example_2_6_family.json",
    );
    assert_eq!(doc["verdict"]["certificate"]["tag"], "Prop7.C-family");
    assert!(doc["verdict"]["flags"].as_array().unwrap().iter().any(|f| f == "family_specific"));
}

#[test]
fn null_fields_carry_reasons() {
    let doc = json(&["analyze", "--fixture", "example_4_1", "--alpha", "0.3"]);
    let nulls = doc["null_fields"].as_array().unwrap();
    assert!(!nulls.is_empty());
    assert!(nulls.iter().all(|n| n["reason"].as_str().is_some_and(|r| !r.is_empty())));
}

#[test]
fn kernel_csv_matches_mehler_formula() {
    // A = I, n = 1, μ = 1: Γ̂(w) = exp(-2π tanh(2πt)|w|²) / cosh(2πt).
    use std::f64::consts::PI;
    let t = 0.3;
    let out = heisolv(&["kernel", "--expr", "X1^2+Y1^2", "--t", "0.3", "--mu", "1", "--grid", "8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,y1,re,im"));
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let r2 = f[0] * f[0] + f[1] * f[1];
        let h = (-2.0 * PI * (2.0 * PI * t).tanh() * r2).exp() / (2.0 * PI * t).cosh();
        worst = worst.max((f[2] - h).abs() + f[3].abs());
        count += 1;
    }
    assert_eq!(count, 64);
    assert!(worst < 1e-12, "max deviation {worst}");
}

#[test]
fn verify_structure_passes_on_family_example() {
    let out = heisolv(&["verify", "--fixture", "example_2_6", "--suite", "structure"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().skip(1).all(|l| l.contains(",pass,") || l.contains(",skip,")));
    assert!(text.contains("(Re S)² = 0"));
}

#[test]
fn verify_classify_suite_is_invariant() {
    let out = heisolv(&["verify", "--fixture", "example_4_1", "--alpha", "0.3", "--suite", "classify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn semigroup_law_on_grid() {
    let doc = json(&["convolve", "--semigroup", "--expr", "X1^2+Y1^2", "--t", "0.1", "--s", "0.1"]);
    let err = doc["err_semigroup"].as_f64().unwrap();
    assert!(err <= 1e-3, "semigroup error {err}");
    assert!(doc["err_contraction"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn convolution_of_binary_grids_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.bin");
    let g = dir.path().join("g.bin");
    let out = dir.path().join("fg.bin");
    for (p, t) in [(&f, "0.1"), (&g, "0.2")] {
        let o = heisolv(&["kernel", "--expr", "X1^2+Y1^2", "--t", t, "--space", "--format", "bin", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let o = heisolv(&[
        "convolve", "--f", f.to_str().unwrap(), "--g", g.to_str().unwrap(), "--format", "bin", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fg = heisolv_core::lab::io::load_binary(&out).unwrap();
    assert_eq!(fg.data.len(), 64 * 64);
}

#[test]
fn exit_codes() {
    assert_eq!(heisolv(&["analyze", "--expr", "X1^^2"]).status.code(), Some(2));
    assert_eq!(heisolv(&["analyze", "--fixture", "no_such_fixture"]).status.code(), Some(2));
    assert_eq!(heisolv(&["kernel", "--expr", "X1^2+Y1^2", "--t", "0.1", "--grid", "6"]).status.code(), Some(2));
    assert_eq!(heisolv(&["convolve"]).status.code(), Some(2));
    // A focal time makes the kernel singular: numerical failure.
    let focal = std::f64::consts::FRAC_PI_2.to_string();
    assert_eq!(heisolv(&["kernel", "--expr", "i*(X1^2+Y1^2)", "--t", &focal, "--grid", "8"]).status.code(), Some(3));
}

#[test]
fn reference_mode_is_byte_stable() {
    let args = ["--reference", "analyze", "--fixture", "example_2_4", "--alpha", "0.3"];
    let a = heisolv(&args);
    let b = heisolv(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn remaining_fixture_goldens() {
    let cases: [(&[&str], &str); 4] = [
        (&["analyze", "--fixture", "example_2_3", "--alpha", "0.5"], "example_2_3_alpha_0.5.json"),
        (&["analyze", "--fixture", "example_2_4", "--alpha", "0.3"], "example_2_4_alpha_0.3.json"),
        (&["analyze", "--fixture", "sublaplacian_n1", "--alpha", "3"], "sublaplacian_n1_alpha_3.json"),
        (&["analyze", "--fixture", "form_2p", "--lambdas", "1,1", "--alpha", "0,2"], "form_2p_alpha_2i.json"),
    ];
    for (args, file) in cases {
        assert_matches_golden(args, file);
    }
}

#[test]
fn reference_mode_reproduces_golden_bytes() {
    let out = heisolv(&["--reference", "analyze", "--fixture", "example_4_1", "--alpha", "0.3"]);
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/example_4_1_alpha_0.3.json");
    let want = std::fs::read_to_string(p).unwrap();
    let got = String::from_utf8(out.stdout).unwrap();
    // The version string is the only field allowed to move between releases.
    let strip = |s: &str| s.lines().filter(|l| !l.contains("\"tool_version\"")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&got), strip(&want));
}
