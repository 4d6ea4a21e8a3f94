//! Closed-form detection functions for the two white-noise families, their
//! noise-tolerance thresholds, and grid sweeps for figure data.
//!
//! For `rho = (1 - p)|psi><psi| + p I/d^N` the criterion reduces to a rational
//! function of p: `gamma` for Dicke states, `delta` for the qudit W state.
//! A value below 1 means the inequality is violated, i.e. the noisy state is
//! detected as non-k-separable. Both functions are strictly increasing in p,
//! so detection holds exactly on `[0, threshold)`; the threshold itself is
//! reported as not detected.

use crate::comb::{binomial_f64, factorial_f64};
use crate::error::{Error, Result};

/// Detection function of the noisy Dicke family.
///
/// `gamma < 1` certifies that `(1-p)|D_m^N><D_m^N| + p I/2^N` is
/// non-k-separable. Equals rhs/lhs of the N-qubit criterion on that state.
pub fn gamma(n: usize, m: usize, k: usize, p: f64) -> Result<f64> {
    check_dicke_args(n, m, k)?;
    check_noise_fraction(p)?;
    let a = (n - m) as f64 * (m as f64 / 2.0);
    let b = (n - k) as f64 / 2.0;
    let c = binomial_f64(n as u64, m as u64);
    let pow = 2f64.powi(n as i32);
    Ok(((a * (p / pow) + b * ((1.0 - p) / c + p / pow)) * c) / (a * (1.0 - p)))
}

/// Detection function of the noisy qudit W family (d = N).
///
/// `delta < 1` certifies that `(1-p)|W_N^d><W_N^d| + p I/d^N` is
/// non-k-separable. Equals rhs/lhs of the N-qudit criterion on that state.
pub fn delta(n: usize, d: usize, k: usize, p: f64) -> Result<f64> {
    check_qudit_args(n, d, k)?;
    check_noise_fraction(p)?;
    let dn = (d as f64).powi(n as i32);
    let nk = (n - k) as f64;
    let mix = p / (dn * (1.0 - p));
    Ok(factorial_f64(n as u64) * mix
        + 2.0 * nk / ((n * (n - 1)) as f64)
        + 2.0 * nk * factorial_f64((n - 2) as u64) * mix)
}

/// Closed-form white-noise tolerance of the Dicke criterion: detection holds
/// for all p strictly below the returned value.
///
/// Degenerate excitation counts (m = 0 or m = n) make the criterion vacuous;
/// the threshold is 0.
pub fn noise_threshold_dicke(n: usize, m: usize, k: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("qubit count must be at least 1"));
    }
    if n > 64 {
        return Err(Error::invalid("Dicke noise analysis supported for n <= 64"));
    }
    if m > n {
        return Err(Error::invalid(format!("excitations {m} exceed n = {n}")));
    }
    check_k(n, k)?;
    let a = (n - m) as f64 * (m as f64 / 2.0);
    let b = (n - k) as f64 / 2.0;
    if a - b <= 0.0 {
        return Ok(0.0);
    }
    let c = binomial_f64(n as u64, m as u64);
    let pow = 2f64.powi(n as i32);
    let denom =
        ((n - m) as f64 / pow) * (m as f64 / 2.0) * c - b + ((n - k) as f64 / (2.0 * pow)) * c + a;
    Ok((a - b) / denom)
}

/// Closed-form white-noise tolerance of the qudit W criterion (d = N).
pub fn noise_threshold_qudit_w(n: usize, d: usize, k: usize) -> Result<f64> {
    check_qudit_args(n, d, k)?;
    let dn = (d as f64).powi(n as i32);
    let head = dn * (2.0 * k as f64 + ((n as f64) - 3.0) * n as f64);
    let tail = ((n * n + n) as f64 - 2.0 * k as f64) * factorial_f64(n as u64);
    Ok(head / (head + tail))
}

/// Root of `gamma(p) = 1` by bisection, the independent route to the Dicke
/// threshold. Returns 0 when even the noiseless state is not detected.
pub fn bisect_gamma_root(n: usize, m: usize, k: usize) -> Result<f64> {
    if m == 0 || m == n {
        return Ok(0.0);
    }
    bisect(|p| gamma(n, m, k, p))
}

/// Root of `delta(p) = 1` by bisection, the independent route to the qudit
/// threshold.
pub fn bisect_delta_root(n: usize, d: usize, k: usize) -> Result<f64> {
    bisect(|p| delta(n, d, k, p))
}

fn bisect(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    if f(0.0)? >= 1.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0 - 1e-14;
    if f(hi)? < 1.0 {
        return Err(Error::Unbounded(
            "detection function stays below 1 on [0, 1)".into(),
        ));
    }
    // the functions are strictly increasing in p
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_dicke_args(n: usize, m: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("qubit count must be at least 1"));
    }
    if n > 64 {
        return Err(Error::invalid("Dicke noise analysis supported for n <= 64"));
    }
    if m == 0 || m >= n {
        return Err(Error::invalid(format!(
            "excitation count m = {m} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    check_k(n, k)
}

fn check_qudit_args(n: usize, d: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("qudit family needs at least 2 subsystems"));
    }
    if n > 34 {
        // n! no longer fits the exact integer factorial
        return Err(Error::invalid("qudit noise analysis supported for n <= 34"));
    }
    if d != n {
        return Err(Error::invalid(format!(
            "the qudit W family requires d = N, got d = {d}, N = {n}"
        )));
    }
    check_k(n, k)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::invalid(format!(
            "separability level k = {k} outside 2..={n}"
        )));
    }
    Ok(())
}

fn check_noise_fraction(p: f64) -> Result<()> {
    if p == 1.0 {
        return Err(Error::Unbounded(
            "detection function diverges at p = 1".into(),
        ));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "noise fraction p = {p} outside [0, 1)"
        )));
    }
    Ok(())
}

/// Which white-noise family a curve or sweep refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Dicke,
    WQudit,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Dicke => "dicke",
            Family::WQudit => "wqudit",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dicke" => Ok(Family::Dicke),
            "wqudit" => Ok(Family::WQudit),
            other => Err(Error::invalid(format!(
                "unknown family '{other}' (expected 'dicke' or 'wqudit')"
            ))),
        }
    }
}

/// One sampled detection curve: (p, gamma or delta) pairs for fixed
/// parameters, or a single (threshold, 1.0) point in threshold mode.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseCurve {
    pub family: Family,
    pub n: usize,
    /// Excitation count; Dicke family only.
    pub m: Option<usize>,
    /// Local dimension; qudit family only (d = n).
    pub d: Option<usize>,
    pub k: usize,
    pub samples: Vec<(f64, f64)>,
}

/// How a sweep samples each parameter combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Sample the detection function over the p grid.
    Curve,
    /// Emit the single point (threshold, 1.0) per combination.
    Threshold,
}

/// Grid specification for [`sweep_curves`]. Parameter combinations that are
/// invalid for a given n (k > n, or m outside 1..n-1) are skipped so that
/// rectangular grids over several n remain convenient.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub n_values: Vec<usize>,
    /// Ignored for the qudit family.
    pub m_values: Vec<usize>,
    pub k_values: Vec<usize>,
    /// Required in curve mode; ignored in threshold mode.
    pub p_grid: Vec<f64>,
    pub mode: SweepMode,
}

/// Sample detection curves or threshold tables over a parameter grid,
/// suitable for CSV export.
pub fn sweep_curves(spec: &SweepSpec) -> Result<Vec<NoiseCurve>> {
    if spec.mode == SweepMode::Curve {
        if spec.p_grid.is_empty() {
            return Err(Error::invalid("empty p grid"));
        }
        if !spec.p_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("p grid must be strictly increasing"));
        }
        for &p in &spec.p_grid {
            check_noise_fraction(p)?;
        }
    }
    if spec.n_values.is_empty() || spec.k_values.is_empty() {
        return Err(Error::invalid("empty parameter grid"));
    }
    if spec.family == Family::Dicke && spec.m_values.is_empty() {
        return Err(Error::invalid("empty excitation grid"));
    }

    let mut curves = Vec::new();
    for &n in &spec.n_values {
        for &k in &spec.k_values {
            if k < 2 || k > n {
                continue;
            }
            match spec.family {
                Family::Dicke => {
                    for &m in &spec.m_values {
                        if m == 0 || m >= n {
                            continue;
                        }
                        let samples = match spec.mode {
                            SweepMode::Curve => spec
                                .p_grid
                                .iter()
                                .map(|&p| Ok((p, gamma(n, m, k, p)?)))
                                .collect::<Result<Vec<_>>>()?,
                            SweepMode::Threshold => {
                                vec![(noise_threshold_dicke(n, m, k)?, 1.0)]
                            }
                        };
                        curves.push(NoiseCurve {
                            family: Family::Dicke,
                            n,
                            m: Some(m),
                            d: None,
                            k,
                            samples,
                        });
                    }
                }
                Family::WQudit => {
                    let samples = match spec.mode {
                        SweepMode::Curve => spec
                            .p_grid
                            .iter()
                            .map(|&p| Ok((p, delta(n, n, k, p)?)))
                            .collect::<Result<Vec<_>>>()?,
                        SweepMode::Threshold => vec![(noise_threshold_qudit_w(n, n, k)?, 1.0)],
                    };
                    curves.push(NoiseCurve {
                        family: Family::WQudit,
                        n,
                        m: None,
                        d: Some(n),
                        k,
                        samples,
                    });
                }
            }
        }
    }
    if curves.is_empty() {
        return Err(Error::invalid(
            "no valid parameter combination in the sweep grid",
        ));
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn gamma_at_zero_noise() {
        // p = 0 reduces to ((n-k)/2) / ((n-m) m/2)
        assert_abs_diff_eq!(gamma(4, 2, 2, 0.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma(9, 2, 3, 0.0).unwrap(), 3.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn gamma_crossing_matches_known_threshold() {
        // gamma(4,2,2,p) crosses 1 at p = 8/17 = 0.470588...
        let root = bisect_gamma_root(4, 2, 2).unwrap();
        assert_abs_diff_eq!(root, 8.0 / 17.0, epsilon = 1e-5);
        assert!(gamma(4, 2, 2, root - 1e-6).unwrap() < 1.0);
        assert!(gamma(4, 2, 2, root + 1e-6).unwrap() > 1.0);
    }

    #[test]
    fn gamma_rejects_bad_arguments() {
        assert!(gamma(4, 0, 2, 0.1).is_err());
        assert!(gamma(4, 4, 2, 0.1).is_err());
        assert!(gamma(4, 2, 1, 0.1).is_err());
        assert!(gamma(4, 2, 5, 0.1).is_err());
        assert!(matches!(gamma(4, 2, 2, 1.0), Err(Error::Unbounded(_))));
        assert!(gamma(4, 2, 2, -0.2).is_err());
    }

    #[test]
    fn delta_values() {
        // k = n at p = 0 kills every term
        assert_abs_diff_eq!(delta(3, 3, 3, 0.0).unwrap(), 0.0, epsilon = 1e-15);
        // 2(n-k)/(n(n-1)) at p = 0
        assert_abs_diff_eq!(delta(3, 3, 2, 0.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let root = bisect_delta_root(3, 3, 2).unwrap();
        assert_abs_diff_eq!(root, 9.0 / 13.0, epsilon = 1e-5);
    }

    #[test]
    fn delta_requires_d_equal_n() {
        assert!(delta(3, 2, 2, 0.1).is_err());
        assert!(delta(1, 1, 2, 0.1).is_err());
        assert!(matches!(delta(3, 3, 2, 1.0), Err(Error::Unbounded(_))));
    }

    #[test]
    fn thresholds_match_known_fractions() {
        assert_relative_eq!(
            noise_threshold_dicke(4, 2, 2).unwrap(),
            8.0 / 17.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            noise_threshold_qudit_w(3, 3, 2).unwrap(),
            9.0 / 13.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn degenerate_dicke_threshold_is_zero() {
        assert_eq!(noise_threshold_dicke(4, 4, 2).unwrap(), 0.0);
        assert_eq!(noise_threshold_dicke(4, 0, 2).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_equals_bisection() {
        for n in 3..=9usize {
            for m in 1..n {
                for k in [2, n] {
                    let closed = noise_threshold_dicke(n, m, k).unwrap();
                    let root = bisect_gamma_root(n, m, k).unwrap();
                    assert_abs_diff_eq!(closed, root, epsilon = 1e-9);
                }
            }
        }
        for n in 2..=8usize {
            for k in 2..=n {
                let closed = noise_threshold_qudit_w(n, n, k).unwrap();
                let root = bisect_delta_root(n, n, k).unwrap();
                assert_abs_diff_eq!(closed, root, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn threshold_symmetry_in_excitations() {
        // m enters only through (n-m)m and C(n,m)
        for n in 3..=12usize {
            for m in 1..n {
                let a = noise_threshold_dicke(n, m, 2).unwrap();
                let b = noise_threshold_dicke(n, n - m, 2).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn detection_functions_increase_in_p() {
        let grid: Vec<f64> = (0..99).map(|i| i as f64 / 100.0).collect();
        for n in [4usize, 6, 9] {
            for m in [1, 2, n - 1] {
                for k in [2, n] {
                    for w in grid.windows(2) {
                        assert!(gamma(n, m, k, w[0]).unwrap() < gamma(n, m, k, w[1]).unwrap());
                    }
                }
            }
        }
        for n in [3usize, 4, 6] {
            for k in 2..=n {
                for w in grid.windows(2) {
                    assert!(delta(n, n, k, w[0]).unwrap() < delta(n, n, k, w[1]).unwrap());
                }
            }
        }
    }

    #[test]
    fn sweep_curve_mode() {
        let spec = SweepSpec {
            family: Family::Dicke,
            n_values: vec![10],
            m_values: vec![2, 4, 6],
            k_values: vec![2, 10],
            p_grid: vec![0.1, 0.5, 0.9],
            mode: SweepMode::Curve,
        };
        let curves = sweep_curves(&spec).unwrap();
        assert_eq!(curves.len(), 6);
        for curve in &curves {
            assert_eq!(curve.samples.len(), 3);
            assert!(curve.samples.iter().all(|&(_, v)| v.is_finite()));
        }
    }

    #[test]
    fn sweep_threshold_mode_equal_ranges_at_n10() {
        let spec = SweepSpec {
            family: Family::Dicke,
            n_values: vec![10],
            m_values: vec![2, 4, 6],
            k_values: vec![2, 10],
            p_grid: vec![],
            mode: SweepMode::Threshold,
        };
        let curves = sweep_curves(&spec).unwrap();
        for k in [2, 10] {
            let th = |m: usize| {
                curves
                    .iter()
                    .find(|c| c.k == k && c.m == Some(m))
                    .unwrap()
                    .samples[0]
                    .0
            };
            assert!(th(2) > th(4));
            assert_abs_diff_eq!(th(4), th(6), epsilon = 1e-12);
        }
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let mut spec = SweepSpec {
            family: Family::Dicke,
            n_values: vec![4],
            m_values: vec![2],
            k_values: vec![2],
            p_grid: vec![],
            mode: SweepMode::Curve,
        };
        assert!(sweep_curves(&spec).is_err());
        spec.p_grid = vec![0.5, 0.1];
        assert!(sweep_curves(&spec).is_err());
        spec.p_grid = vec![0.1, 0.5];
        spec.k_values = vec![7];
        assert!(sweep_curves(&spec).is_err());
    }

    #[test]
    fn single_point_sweep() {
        let spec = SweepSpec {
            family: Family::WQudit,
            n_values: vec![3],
            m_values: vec![],
            k_values: vec![2],
            p_grid: vec![0.25],
            mode: SweepMode::Curve,
        };
        let curves = sweep_curves(&spec).unwrap();
        assert_eq!(curves.len(), 1);
        assert_eq!(curves[0].samples.len(), 1);
        assert_abs_diff_eq!(
            curves[0].samples[0].1,
            delta(3, 3, 2, 0.25).unwrap(),
            epsilon = 0.0
        );
    }
}
