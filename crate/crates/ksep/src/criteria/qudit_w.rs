//! The N-qudit inequality (d = N) tuned to the W-class support.
//!
//! Left-side pairs are permutation digit-strings of 01...(N-1) that agree on
//! exactly N - 2 positions, i.e. differ by one transposition. The paired
//! square-root term replaces the swapped digits (a, b), a < b, by (a, a) and
//! (b, b); the penalty runs over all N! permutation diagonals.

use itertools::Itertools;

use super::{check_dim, evaluate_index_sets, CriterionReport};
use crate::error::{Error, Result};
use crate::state::{dimension, DensityMatrix};

/// Matrix index sets for an N-qudit system with d = N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets {
    pub n: usize,
    pub d: usize,
    /// Unordered off-diagonal pairs, row < col, each exactly once.
    pub lhs_pairs: Vec<(usize, usize)>,
    /// Diagonal pairs aligned with `lhs_pairs`: entry i repeats the smaller
    /// swapped digit in the first index and the larger in the second.
    pub sqrt_pairs: Vec<(usize, usize)>,
    /// All n! permutation-string diagonals.
    pub diag_indices: Vec<usize>,
}

fn digit_index(digits: &[u8], d: usize) -> usize {
    digits.iter().fold(0usize, |acc, &x| acc * d + x as usize) + 1
}

/// Build the index sets of the N-qudit criterion.
pub fn index_sets(n: usize) -> Result<IndexSets> {
    if n < 2 {
        return Err(Error::invalid(
            "qudit criterion needs at least 2 subsystems",
        ));
    }
    dimension(n, n)?;
    if n > 8 {
        return Err(Error::invalid("index enumeration supported for n <= 8"));
    }
    let d = n;

    let mut pairs: Vec<((usize, usize), (usize, usize))> = Vec::new();
    let mut diag_indices = Vec::new();
    for perm in (0..n as u8).permutations(n) {
        diag_indices.push(digit_index(&perm, d));
        for i in 0..n {
            for j in i + 1..n {
                // emit each unordered pair once: from the string holding the
                // smaller digit at the more significant swapped position
                if perm[i] > perm[j] {
                    continue;
                }
                let mut swapped = perm.clone();
                swapped.swap(i, j);
                let lhs = (digit_index(&perm, d), digit_index(&swapped, d));

                let (a, b) = (perm[i], perm[j]);
                let mut low = perm.clone();
                low[i] = a;
                low[j] = a;
                let mut high = perm.clone();
                high[i] = b;
                high[j] = b;
                pairs.push((lhs, (digit_index(&low, d), digit_index(&high, d))));
            }
        }
    }
    pairs.sort_unstable();
    let (lhs_pairs, sqrt_pairs) = pairs.into_iter().unzip();
    diag_indices.sort_unstable();

    Ok(IndexSets {
        n,
        d,
        lhs_pairs,
        sqrt_pairs,
        diag_indices,
    })
}

/// Evaluate the inequality at separability level k.
pub fn evaluate(
    rho: &DensityMatrix,
    sets: &IndexSets,
    k: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    check_dim(rho, dimension(sets.n, sets.d)?)?;
    evaluate_index_sets(
        rho,
        &sets.lhs_pairs,
        &sets.sqrt_pairs,
        &sets.diag_indices,
        sets.n,
        k,
        tolerance,
    )
}

/// Convenience wrapper building the index sets inline.
pub fn evaluate_state(
    rho: &DensityMatrix,
    n: usize,
    k: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    evaluate(rho, &index_sets(n)?, k, tolerance)
}
