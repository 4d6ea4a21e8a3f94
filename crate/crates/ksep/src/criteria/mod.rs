//! Density-matrix-element inequalities certifying non-k-separability.
//!
//! Both criteria have the same shape: a sum of off-diagonal moduli on the
//! left, and on the right a sum of geometric means of diagonal pairs plus a
//! penalty `((N - k)/2) * sum of support diagonals`. A state violating the
//! inequality for a given k is non-k-separable; violation at k = 2 certifies
//! genuine multipartite entanglement.

pub mod dicke;
pub mod qudit_w;

use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Default absolute tolerance on the violation margin, separating genuine
/// violations from float noise near the detection boundary.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

/// Outcome of one (state, criterion, k) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs - rhs; the inequality is violated when this exceeds `tolerance`.
    pub margin: f64,
    pub violated: bool,
    pub k: usize,
    pub tolerance: f64,
    pub note: Option<String>,
}

/// Shared evaluation core: both criteria reduce to their index sets.
pub(crate) fn evaluate_index_sets(
    rho: &DensityMatrix,
    lhs_pairs: &[(usize, usize)],
    sqrt_pairs: &[(usize, usize)],
    diag_indices: &[usize],
    n: usize,
    k: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    if k < 2 || k > n {
        return Err(Error::invalid(format!(
            "separability level k = {k} outside 2..={n}"
        )));
    }

    let mut lhs = 0.0;
    for &(row, col) in lhs_pairs {
        lhs += rho.element(row, col)?.norm();
    }

    let mut rhs = 0.0;
    for &(a, b) in sqrt_pairs {
        let da = checked_diagonal(rho, a, tolerance)?;
        let db = checked_diagonal(rho, b, tolerance)?;
        rhs += (da * db).sqrt();
    }
    let penalty_weight = (n - k) as f64 / 2.0;
    let mut support = 0.0;
    for &r in diag_indices {
        support += checked_diagonal(rho, r, tolerance)?;
    }
    rhs += penalty_weight * support;

    let margin = lhs - rhs;
    Ok(CriterionReport {
        lhs,
        rhs,
        margin,
        violated: margin > tolerance,
        k,
        tolerance,
        note: None,
    })
}

/// Diagonal read that rejects meaningfully negative values and clamps
/// tolerance-level noise to zero so the square roots stay real.
pub(crate) fn checked_diagonal(rho: &DensityMatrix, index: usize, tolerance: f64) -> Result<f64> {
    let v = rho.diagonal(index)?;
    if v < -tolerance {
        return Err(Error::MalformedState(format!(
            "diagonal entry ({index}, {index}) = {v} is negative"
        )));
    }
    Ok(v.max(0.0))
}

pub(crate) fn check_dim(rho: &DensityMatrix, expected: usize) -> Result<()> {
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: rho.dim(),
        });
    }
    Ok(())
}
