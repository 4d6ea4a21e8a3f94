//! Set partitions of the subsystem labels {1..N} into k blocks, the
//! closed-form partition count, and the seeded random k-separable mixed-state
//! sampler used to falsify the separability criteria.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::comb::factorial;
use crate::error::{Error, Result};
use crate::state::{dimension, DensityMatrix, STATE_TOLERANCE};

/// A division of the subsystem labels {1..N} into disjoint non-empty blocks.
///
/// Canonical form: members sorted within each block, blocks sorted by their
/// smallest member, so every partition has exactly one representation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn subsystem_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

/// Every set partition of {1..n} into exactly k blocks, each appearing once
/// in canonical form.
///
/// Enumerated by assigning label i to one of the blocks already open or to a
/// new block (a restricted-growth walk), which yields the canonical order
/// directly.
pub fn enumerate_partitions(n: usize, k: usize) -> Result<Vec<Partition>> {
    check_partition_args(n, k)?;
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    assign(1, n, k, &mut blocks, &mut out);
    Ok(out)
}

fn assign(
    label: usize,
    n: usize,
    k: usize,
    blocks: &mut Vec<Vec<usize>>,
    out: &mut Vec<Partition>,
) {
    if label > n {
        if blocks.len() == k {
            out.push(Partition {
                blocks: blocks.clone(),
            });
        }
        return;
    }
    // prune: the remaining labels must be able to open enough new blocks
    let remaining = n - label + 1;
    let needed = k.saturating_sub(blocks.len());
    if needed > remaining {
        return;
    }
    for i in 0..blocks.len() {
        blocks[i].push(label);
        assign(label + 1, n, k, blocks, out);
        blocks[i].pop();
    }
    if blocks.len() < k {
        blocks.push(vec![label]);
        assign(label + 1, n, k, blocks, out);
        blocks.pop();
    }
}

/// Closed-form partition count: iterate over the block-size multisets
/// {m_1..m_k} with sum n, take the multinomial N!/(prod m_i!) and divide by
/// c_j! for every block size j repeated c_j times.
pub fn count_partitions_formula(n: usize, k: usize) -> Result<u128> {
    check_partition_args(n, k)?;

    // multinomial n!/(prod m_i!), divided by c! per block size repeated c times
    fn shape_count(n: usize, sizes: &[usize]) -> u128 {
        let mut count = factorial(n as u64);
        for &m in sizes {
            count /= factorial(m as u64);
        }
        let mut run = 1u64;
        for i in 1..=sizes.len() {
            if i < sizes.len() && sizes[i] == sizes[i - 1] {
                run += 1;
            } else {
                count /= factorial(run);
                run = 1;
            }
        }
        count
    }

    // non-increasing block-size multisets with exactly k parts summing to n
    fn walk(
        n: usize,
        remaining: usize,
        parts_left: usize,
        max_part: usize,
        sizes: &mut Vec<usize>,
        total: &mut u128,
    ) {
        if parts_left == 0 {
            *total += shape_count(n, sizes);
            return;
        }
        let lo = remaining.div_ceil(parts_left);
        let hi = max_part.min(remaining - (parts_left - 1));
        for m in lo..=hi {
            sizes.push(m);
            walk(n, remaining - m, parts_left - 1, m, sizes, total);
            sizes.pop();
        }
    }

    let mut total = 0u128;
    walk(n, n, k, n, &mut Vec::new(), &mut total);
    Ok(total)
}

fn check_partition_args(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("subsystem count must be at least 1"));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "block count k = {k} outside 1..={n}"
        )));
    }
    Ok(())
}

/// Convex mixture of `terms` pure k-separable states, each a tensor product
/// of random block states over an independently drawn random k-partition.
/// Deterministic for a given seed.
///
/// Block amplitudes are sampled with independent standard-normal real and
/// imaginary parts and normalized; mixture weights are uniform draws,
/// normalized.
pub fn random_k_separable_state(
    n: usize,
    k: usize,
    d: usize,
    terms: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    check_partition_args(n, k)?;
    if d < 2 {
        return Err(Error::invalid("local dimension must be at least 2"));
    }
    if terms == 0 {
        return Err(Error::invalid("mixture size must be at least 1"));
    }
    let dim = dimension(n, d)?;
    let partitions = enumerate_partitions(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }

    // accumulate the upper triangle densely, then validate once
    let mut upper = vec![Complex64::new(0.0, 0.0); dim * dim];
    for &w in &weights {
        let partition = &partitions[rng.gen_range(0..partitions.len())];
        let psi = random_product_state(partition, n, d, dim, &mut rng);
        for r in 0..dim {
            if psi[r] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in r..dim {
                upper[r * dim + c] += w * psi[r] * psi[c].conj();
            }
        }
    }

    let mut entries = BTreeMap::new();
    for r in 0..dim {
        for c in r..dim {
            let v = upper[r * dim + c];
            if v != Complex64::new(0.0, 0.0) {
                entries.insert((r + 1, c + 1), v);
            }
        }
    }
    DensityMatrix::from_entries(dim, entries, STATE_TOLERANCE)
}

/// Tensor product of one normalized Gaussian-random state per block,
/// expanded to the full d^n amplitude vector.
fn random_product_state(
    partition: &Partition,
    n: usize,
    d: usize,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Complex64> {
    let block_states: Vec<(&Vec<usize>, Vec<Complex64>)> = partition
        .blocks()
        .iter()
        .map(|members| {
            let block_dim = d.pow(members.len() as u32);
            let mut amps: Vec<Complex64> = (0..block_dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im)
                })
                .collect();
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            (members, amps)
        })
        .collect();

    let mut digits = vec![0usize; n];
    (0..dim)
        .map(|idx| {
            let mut rest = idx;
            for slot in (0..n).rev() {
                digits[slot] = rest % d;
                rest /= d;
            }
            block_states
                .iter()
                .map(|(members, amps)| {
                    let sub = members
                        .iter()
                        .fold(0usize, |acc, &member| acc * d + digits[member - 1]);
                    amps[sub]
                })
                .product()
        })
        .collect()
}
