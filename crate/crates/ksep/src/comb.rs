//! Exact integer combinatorics shared by the state constructors, the index-set
//! generators and the closed-form noise functions.

/// n! as an exact 128-bit integer. Exact for n <= 33.
pub fn factorial(n: u64) -> u128 {
    (2..=n as u128).product::<u128>().max(1)
}

/// Binomial coefficient C(n, k), exact.
///
/// Computed multiplicatively; every intermediate division is exact because
/// each prefix is itself a binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn binomial_f64(n: u64, k: u64) -> f64 {
    binomial(n, k) as f64
}

pub fn factorial_f64(n: u64) -> f64 {
    factorial(n) as f64
}
