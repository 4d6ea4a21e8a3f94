//! The N-qubit inequality tuned to Dicke states with m excitations.
//!
//! Matrix indices are the one-based `sum 2^p + 1` over sets of bit positions
//! (position 0 = last qubit). The left side sums |rho| over pairs of
//! m-subsets sharing exactly m - 1 positions; each such pair {P, Q} is in
//! bijection with the square-root pair (index of P∩Q, index of P∪Q) on the
//! right, and the penalty runs over all m-subset diagonals.

use itertools::Itertools;

use super::{check_dim, evaluate_index_sets, CriterionReport};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Matrix index sets for given (n, m), precomputable and shareable across
/// evaluations with different k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets {
    pub n: usize,
    pub m: usize,
    /// Unordered off-diagonal pairs, row < col, each exactly once.
    pub lhs_pairs: Vec<(usize, usize)>,
    /// Diagonal-pair indices under the square roots, aligned with
    /// `lhs_pairs`: entry i is (index of P∩Q, index of P∪Q) for pair i.
    pub sqrt_pairs: Vec<(usize, usize)>,
    /// All m-subset diagonals (the state-family support).
    pub diag_indices: Vec<usize>,
    /// True when m = 0 or m = n, where no valid pair exists and the
    /// inequality is vacuous.
    pub degenerate: bool,
}

fn qubit_index(positions: &[usize]) -> usize {
    positions.iter().map(|&p| 1usize << p).sum::<usize>() + 1
}

/// Build the index sets of the N-qubit criterion.
pub fn index_sets(n: usize, m: usize) -> Result<IndexSets> {
    if n == 0 {
        return Err(Error::invalid("qubit count must be at least 1"));
    }
    if n > 30 {
        return Err(Error::invalid("index enumeration supported for n <= 30"));
    }
    if m > n {
        return Err(Error::invalid(format!(
            "excitation count {m} exceeds qubit count {n}"
        )));
    }
    if m == 0 || m == n {
        return Ok(IndexSets {
            n,
            m,
            lhs_pairs: Vec::new(),
            sqrt_pairs: Vec::new(),
            diag_indices: (0..n).combinations(m).map(|s| qubit_index(&s)).collect(),
            degenerate: true,
        });
    }

    let mut pairs: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for shared in (0..n).combinations(m - 1) {
        let rest: Vec<usize> = (0..n).filter(|p| !shared.contains(p)).collect();
        for extra in rest.into_iter().combinations(2) {
            let (x, y) = (extra[0], extra[1]);
            let mut p_set = shared.clone();
            p_set.push(x);
            let mut q_set = shared.clone();
            q_set.push(y);
            let (pi, qi) = (qubit_index(&p_set), qubit_index(&q_set));
            let lhs = (pi.min(qi), pi.max(qi));

            let mut union = shared.clone();
            union.push(x);
            union.push(y);
            pairs.push((lhs, (qubit_index(&shared), qubit_index(&union))));
        }
    }
    pairs.sort_unstable();
    let (lhs_pairs, sqrt_pairs) = pairs.into_iter().unzip();

    let mut diag_indices: Vec<usize> = (0..n).combinations(m).map(|s| qubit_index(&s)).collect();
    diag_indices.sort_unstable();

    Ok(IndexSets {
        n,
        m,
        lhs_pairs,
        sqrt_pairs,
        diag_indices,
        degenerate: false,
    })
}

/// Evaluate the inequality at separability level k.
pub fn evaluate(
    rho: &DensityMatrix,
    sets: &IndexSets,
    k: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    check_dim(rho, 1usize << sets.n)?;
    let mut report = evaluate_index_sets(
        rho,
        &sets.lhs_pairs,
        &sets.sqrt_pairs,
        &sets.diag_indices,
        sets.n,
        k,
        tolerance,
    )?;
    if sets.degenerate {
        report.note = Some(format!(
            "no valid index pairs for m = {} of n = {}; inequality is vacuous",
            sets.m, sets.n
        ));
    }
    Ok(report)
}

/// Convenience wrapper building the index sets inline.
pub fn evaluate_state(
    rho: &DensityMatrix,
    n: usize,
    m: usize,
    k: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    evaluate(rho, &index_sets(n, m)?, k, tolerance)
}
