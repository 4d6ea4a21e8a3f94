//! Oracles and helpers shared by the integration suites. Everything here is
//! independent of the library code paths it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;

use ksep::observables::reconstruct_element;
use ksep::state::{DensityMatrix, STATE_TOLERANCE};

/// Stirling number of the second kind via the recurrence
/// S(n, k) = k S(n-1, k) + S(n-1, k-1).
pub fn stirling2(n: usize, k: usize) -> u128 {
    if n == 0 && k == 0 {
        return 1;
    }
    if n == 0 || k == 0 || k > n {
        return 0;
    }
    k as u128 * stirling2(n - 1, k) + stirling2(n - 1, k - 1)
}

/// Bell number as the row sum of Stirling numbers.
pub fn bell(n: usize) -> u128 {
    (1..=n).map(|k| stirling2(n, k)).sum::<u128>().max(1)
}

/// Convex combination of density matrices, assembled densely and
/// re-validated.
pub fn mix_states(components: &[(f64, DensityMatrix)]) -> DensityMatrix {
    let dim = components[0].1.dim();
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    let mut entries: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    for (w, rho) in components {
        assert_eq!(rho.dim(), dim);
        for (&key, &v) in rho.entries() {
            *entries.entry(key).or_insert(Complex64::new(0.0, 0.0)) += (w / total) * v;
        }
    }
    DensityMatrix::from_entries(dim, entries, STATE_TOLERANCE).expect("mixture is a state")
}

/// Criterion sums computed purely from local-observable expectations: the
/// route that must agree with direct sparse evaluation.
pub fn sums_via_observables(
    rho: &DensityMatrix,
    n: usize,
    d: usize,
    lhs_pairs: &[(usize, usize)],
    sqrt_pairs: &[(usize, usize)],
    diag_indices: &[usize],
    k: usize,
) -> (f64, f64) {
    let mut lhs = 0.0;
    for &(row, col) in lhs_pairs {
        lhs += reconstruct_element(rho, n, d, row, col).unwrap().norm();
    }
    let mut rhs = 0.0;
    for &(a, b) in sqrt_pairs {
        let da = reconstruct_element(rho, n, d, a, a).unwrap().re.max(0.0);
        let db = reconstruct_element(rho, n, d, b, b).unwrap().re.max(0.0);
        rhs += (da * db).sqrt();
    }
    let mut support = 0.0;
    for &r in diag_indices {
        support += reconstruct_element(rho, n, d, r, r).unwrap().re;
    }
    rhs += (n - k) as f64 / 2.0 * support;
    (lhs, rhs)
}
