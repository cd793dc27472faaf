//! Small-denominator scans: the diophantine condition for `Σ iλ_j(X_j² + Y_j²) + iαU`
//! and the exceptional set `{±Σ(2k_j+1) iω_j}`.

use num_complex::Complex64 as C64;
use num_rational::Ratio;
use serde::Serialize;

pub type Q = Ratio<i128>;

/// Continued-fraction reconstruction of `x` as `p/q` with `q ≤ max_den` and
/// `|x - p/q| ≤ tol`.
pub fn snap_rational(x: f64, max_den: i128, tol: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol * x.abs().max(1.0) {
            return Some(Q::new(h1, k1));
        }
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

const MAX_DEN: i128 = 1_000_000;
const SNAP_TOL: f64 = 1e-12;
const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QClass {
    Violated,
    Plausible,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionQReport {
    pub k_max: usize,
    pub min_distance: f64,
    /// Multi-index and sign (+1 / -1) of the smallest distance found.
    pub argmin: (Vec<usize>, i8),
    /// Exact (or below 1e-12) zeros found in the scan.
    pub zero_witnesses: Vec<(Vec<usize>, i8)>,
    /// Whether α and every λ_j were reconstructed as rationals and the scan
    /// used exact arithmetic.
    pub exact: bool,
    pub fitted_c: Option<f64>,
    pub fitted_m: Option<u32>,
    pub classification: QClass,
    pub note: String,
}

/// Multi-indices in `ℕ^n` with `|k| = s`, for each `s ≤ k_max`, in shell order.
fn shells(n: usize, k_max: usize, mut visit: impl FnMut(usize, &[usize])) {
    fn rec(pos: usize, left: usize, k: &mut Vec<usize>, s: usize, visit: &mut dyn FnMut(usize, &[usize])) {
        if pos + 1 == k.len() {
            k[pos] = left;
            visit(s, k);
            return;
        }
        for v in 0..=left {
            k[pos] = v;
            rec(pos + 1, left - v, k, s, visit);
        }
    }
    if n == 0 {
        visit(0, &[]);
        return;
    }
    let mut k = vec![0; n];
    for s in 0..=k_max {
        rec(0, s, &mut k, s, &mut visit);
    }
}

fn shell_count(n: usize, k_max: usize) -> f64 {
    // C(k_max + n, n)
    (1..=n).fold(1.0, |acc, j| acc * (k_max + j) as f64 / j as f64)
}

/// Scan `|α ± Σ(2k_j+1) iλ_j|` over `|k| ≤ k_max` and both signs.
///
/// Zeros are detected exactly when α and all λ_j are Gaussian-rational
/// (continued-fraction reconstruction with denominators ≤ 10⁶ and error
/// ≤ 1e-12), and by a 1e-12 threshold otherwise. For a rational scan without
/// zeros the distances lie on a lattice, so `M = 0` is reported. Otherwise
/// `M` is the smallest exponent ≤ `m_max` for which
/// `C_M = min_{|k| ≤ K} d(k)(1+|k|)^M` agrees between `K = k_max/2` and
/// `K = k_max` within a factor of two. With `exact_mode` off every input is
/// treated as floating point.
pub fn condition_2q(alpha: C64, lambdas: &[f64], k_max: usize, m_max: u32, exact_mode: bool) -> ConditionQReport {
    let n = lambdas.len();
    let mut k_max = k_max.max(1);
    let mut note = String::new();
    while shell_count(n, k_max) > 4e6 {
        k_max /= 2;
        note = format!("k_max reduced to {k_max} to bound the scan size; ");
    }
    let snap = |x: f64| if exact_mode { snap_rational(x, MAX_DEN, SNAP_TOL) } else { None };
    let rat_alpha = snap(alpha.re).zip(snap(alpha.im));
    let rat_l: Option<Vec<Q>> = lambdas.iter().map(|&l| snap(l)).collect();
    let exact = rat_alpha.is_some() && rat_l.is_some();

    let mut shell_min = vec![f64::INFINITY; k_max + 1];
    let mut best = (f64::INFINITY, Vec::new(), 1i8);
    let mut zeros = Vec::new();
    shells(n, k_max, |s, k| {
        let sum: f64 = k.iter().zip(lambdas).map(|(&kj, l)| (2 * kj + 1) as f64 * l).sum();
        for sign in [1i8, -1] {
            let val = alpha + C64::new(0.0, sign as f64 * sum);
            let d = val.norm();
            let is_zero = match (&rat_alpha, &rat_l) {
                (Some((ar, ai)), Some(ls)) => {
                    let exact_sum: Q = k.iter().zip(ls).map(|(&kj, l)| *l * Q::from_integer((2 * kj + 1) as i128)).sum();
                    *ar == Q::from_integer(0) && *ai + exact_sum * Q::from_integer(sign as i128) == Q::from_integer(0)
                }
                _ => d <= ZERO_TOL * (1.0 + alpha.norm()),
            };
            if is_zero && zeros.len() < 16 {
                zeros.push((k.to_vec(), sign));
            }
            shell_min[s] = shell_min[s].min(d);
            if d < best.0 {
                best = (d, k.to_vec(), sign);
            }
        }
    });

    let (classification, fitted_c, fitted_m) = if !zeros.is_empty() {
        (QClass::Violated, None, None)
    } else if exact {
        note.push_str("rational data: distances lie on a lattice, bound holds with M = 0 on the scanned range");
        (QClass::Plausible, Some(best.0), Some(0))
    } else {
        let c_m = |m: u32, upto: usize| {
            (0..=upto).map(|s| shell_min[s] * (1.0 + s as f64).powi(m as i32)).fold(f64::INFINITY, f64::min)
        };
        let fit = (0..=m_max).find(|&m| {
            let (half, full) = (c_m(m, k_max / 2), c_m(m, k_max));
            full > 0.0 && half <= 2.0 * full
        });
        match fit {
            Some(0) => {
                note.push_str("irrational data: minimum distance stable over the scan (bounded check, not a proof)");
                (QClass::Plausible, Some(c_m(0, k_max)), Some(0))
            }
            Some(m) => {
                note.push_str("irrational data: distances decay; fitted polynomial rate is not a proof");
                (QClass::Inconclusive, Some(c_m(m, k_max)), Some(m))
            }
            None => {
                note.push_str("no stable polynomial lower bound up to m_max");
                (QClass::Inconclusive, None, None)
            }
        }
    };
    ConditionQReport {
        k_max,
        min_distance: best.0,
        argmin: (best.1, best.2),
        zero_witnesses: zeros,
        exact,
        fitted_c,
        fitted_m,
        classification,
        note,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalValue {
    pub value: [f64; 2],
    pub k: Vec<usize>,
    pub sign: i8,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalSet {
    pub omegas: Vec<[f64; 2]>,
    pub bound: f64,
    pub values: Vec<ExceptionalValue>,
}

impl ExceptionalSet {
    pub fn contains(&self, alpha: C64, tol: f64) -> Option<&ExceptionalValue> {
        self.values.iter().find(|v| (C64::new(v.value[0], v.value[1]) - alpha).norm() <= tol)
    }
}

/// All `±Σ(2k_j+1) iω_j` with `Σ(2k_j+1) Im ω_j ≤ bound`, deduplicated within
/// 1e-12. Since `Re(iω_j) = -Im ω_j`, every value `z` satisfies
/// `|Re z| = Σ(2k_j+1) Im ω_j`.
pub fn exceptional_set(omegas: &[C64], bound: f64) -> ExceptionalSet {
    let nus: Vec<f64> = omegas.iter().map(|w| w.im).collect();
    let mut values: Vec<ExceptionalValue> = Vec::new();
    let n = omegas.len();
    let nu_min = nus.iter().copied().fold(f64::INFINITY, f64::min);
    if n > 0 && nu_min > 0.0 {
        let nu_sum: f64 = nus.iter().sum();
        let k_cap = (((bound - nu_sum) / (2.0 * nu_min)).floor().max(0.0)) as usize;
        shells(n, k_cap, |_, k| {
            let weight: f64 = k.iter().zip(&nus).map(|(&kj, nu)| (2 * kj + 1) as f64 * nu).sum();
            if weight > bound + 1e-12 {
                return;
            }
            let base: C64 = k.iter().zip(omegas).map(|(&kj, w)| C64::new(0.0, (2 * kj + 1) as f64) * w).sum();
            for sign in [1i8, -1] {
                let z = base * sign as f64;
                if values.iter().all(|v| (C64::new(v.value[0], v.value[1]) - z).norm() > 1e-12) {
                    values.push(ExceptionalValue { value: [z.re, z.im], k: k.to_vec(), sign });
                }
            }
        });
    }
    values.sort_by(|a, b| a.value[0].total_cmp(&b.value[0]).then(a.value[1].total_cmp(&b.value[1])));
    ExceptionalSet { omegas: omegas.iter().map(|w| [w.re, w.im]).collect(), bound, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping() {
        assert_eq!(snap_rational(0.75, 100, 1e-12), Some(Q::new(3, 4)));
        assert_eq!(snap_rational(-2.0, 100, 1e-12), Some(Q::from_integer(-2)));
        assert_eq!(snap_rational(2f64.sqrt(), 1_000_000, 1e-12), None);
    }

    #[test]
    fn equal_frequencies() {
        let r = condition_2q(C64::new(0., 2.), &[1., 1.], 50, 10, true);
        assert_eq!(r.classification, QClass::Violated);
        assert!(r.zero_witnesses.contains(&(vec![0, 0], -1)));
        let r = condition_2q(C64::new(0., 1.), &[1., 1.], 50, 10, true);
        assert_eq!(r.classification, QClass::Plausible);
        assert!((r.min_distance - 1.0).abs() < 1e-12);
        assert_eq!((r.fitted_c, r.fitted_m), (Some(1.0), Some(0)));
    }

    #[test]
    fn irrational_ratio_is_never_exact() {
        let r = condition_2q(C64::new(0., 1.), &[1., 2f64.sqrt()], 40, 10, true);
        assert!(!r.exact);
        assert_ne!(r.classification, QClass::Violated);
    }

    #[test]
    fn exceptional_values_of_single_frequency() {
        let e = exceptional_set(&[C64::new(0., 1.)], 7.0);
        let vals: Vec<[f64; 2]> = e.values.iter().map(|v| v.value).collect();
        assert_eq!(vals, vec![[-7., 0.], [-5., 0.], [-3., 0.], [-1., 0.], [1., 0.], [3., 0.], [5., 0.], [7., 0.]]);
        assert_eq!(e.contains(C64::new(3., 0.), 1e-12).unwrap().k, vec![1]);
        assert!(e.contains(C64::new(0., 3.), 1e-12).is_none());
    }

    #[test]
    fn exceptional_values_of_two_frequencies() {
        let e = exceptional_set(&[C64::new(0., 1.), C64::new(0., 2.)], 5.0);
        let vals: Vec<[f64; 2]> = e.values.iter().map(|v| v.value).collect();
        assert_eq!(vals, vec![[-5., 0.], [-3., 0.], [3., 0.], [5., 0.]]);
    }
}
