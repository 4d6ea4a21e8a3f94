//! Pure states, noisy density matrices and the index conventions shared by
//! both separability criteria.
//!
//! Subsystem 1 is the most significant digit of a basis label, so the
//! one-based matrix index of a label is `sum_i digits[i] * d^(N-i) + 1`. For
//! qubits this is `sum 2^p + 1` over the set bit positions, where bit
//! position 0 is the *last* qubit. That convention is what makes the golden
//! index sets of the two criteria come out right; do not change it.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64;

use crate::comb::binomial;
use crate::error::{Error, Result};

/// Absolute tolerance for state-equality invariants (normalization, trace,
/// Hermiticity of inputs).
pub const STATE_TOLERANCE: f64 = 1e-12;

/// One computational basis label of `N` subsystems with local dimension `d`,
/// subsystem 1 first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    digits: Vec<u8>,
}

impl BasisLabel {
    pub fn new(digits: Vec<u8>, d: usize) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::invalid("basis label needs at least one digit"));
        }
        if let Some(&bad) = digits.iter().find(|&&x| x as usize >= d) {
            return Err(Error::invalid(format!(
                "digit {bad} out of range for local dimension {d}"
            )));
        }
        Ok(BasisLabel { digits })
    }

    /// Qubit label with ones at the given bit positions (position 0 = last
    /// qubit).
    pub fn from_bit_positions(n: usize, positions: &[usize]) -> Result<Self> {
        let mut digits = vec![0u8; n];
        for &p in positions {
            if p >= n {
                return Err(Error::invalid(format!("bit position {p} >= n = {n}")));
            }
            digits[n - 1 - p] = 1;
        }
        BasisLabel::new(digits, 2)
    }

    pub fn from_one_based(index: usize, n: usize, d: usize) -> Result<Self> {
        let dim = dimension(n, d)?;
        if index < 1 || index > dim {
            return Err(Error::invalid(format!(
                "index {index} out of range 1..={dim}"
            )));
        }
        let mut rest = index - 1;
        let mut digits = vec![0u8; n];
        for slot in (0..n).rev() {
            digits[slot] = (rest % d) as u8;
            rest /= d;
        }
        Ok(BasisLabel { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn n(&self) -> usize {
        self.digits.len()
    }

    /// `sum_i digits[i] * d^(N-i) + 1`, subsystem 1 most significant.
    pub fn one_based_index(&self, d: usize) -> usize {
        let mut idx = 0usize;
        for &digit in &self.digits {
            idx = idx * d + digit as usize;
        }
        idx + 1
    }
}

pub(crate) fn dimension(n: usize, d: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("subsystem count must be at least 1"));
    }
    if d == 0 {
        return Err(Error::invalid("local dimension must be at least 1"));
    }
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim
            .checked_mul(d)
            .ok_or_else(|| Error::invalid(format!("d^N overflows for d = {d}, N = {n}")))?;
    }
    Ok(dim)
}

/// Sparse pure state: complex amplitudes over the labels in its support.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    d: usize,
    amplitudes: BTreeMap<BasisLabel, Complex64>,
}

impl PureState {
    pub fn new(n: usize, d: usize, amplitudes: BTreeMap<BasisLabel, Complex64>) -> Result<Self> {
        dimension(n, d)?;
        let mut norm_sq = 0.0;
        for (label, amp) in &amplitudes {
            if label.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: label.n(),
                });
            }
            if label.digits().iter().any(|&x| x as usize >= d) {
                return Err(Error::invalid("label digit exceeds local dimension"));
            }
            norm_sq += amp.norm_sqr();
        }
        if (norm_sq - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::MalformedState(format!(
                "state norm^2 = {norm_sq}, expected 1"
            )));
        }
        Ok(PureState { n, d, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        dimension(self.n, self.d).expect("validated at construction")
    }

    pub fn amplitudes(&self) -> &BTreeMap<BasisLabel, Complex64> {
        &self.amplitudes
    }

    pub fn support_size(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.amplitudes
            .get(label)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }
}

/// N-qubit Dicke state with `m` excitations: the equal-weight superposition
/// of every weight-m bitstring, amplitude `1/sqrt(C(n, m))`.
pub fn dicke_state(n: usize, m: usize) -> Result<PureState> {
    if n == 0 {
        return Err(Error::invalid("qubit count must be at least 1"));
    }
    if m > n {
        return Err(Error::invalid(format!(
            "excitation count {m} exceeds qubit count {n}"
        )));
    }
    let count = binomial(n as u64, m as u64) as f64;
    let amp = Complex64::new(1.0 / count.sqrt(), 0.0);
    let mut amplitudes = BTreeMap::new();
    for positions in (0..n).combinations(m) {
        amplitudes.insert(BasisLabel::from_bit_positions(n, &positions)?, amp);
    }
    PureState::new(n, 2, amplitudes)
}

/// N-qudit W state with d = N: the equal-weight superposition of all
/// permutations of the digit string 01...(N-1), amplitude `1/sqrt(N!)`.
pub fn qudit_w_state(n: usize) -> Result<PureState> {
    if n == 0 {
        return Err(Error::invalid("subsystem count must be at least 1"));
    }
    dimension(n, n)?;
    let fact = crate::comb::factorial(n as u64) as f64;
    let amp = Complex64::new(1.0 / fact.sqrt(), 0.0);
    let mut amplitudes = BTreeMap::new();
    for digits in (0..n as u8).permutations(n) {
        amplitudes.insert(BasisLabel::new(digits, n)?, amp);
    }
    PureState::new(n, n, amplitudes)
}

/// Sparse Hermitian density matrix with one-based (row, col) indices, stored
/// for row <= col only; reads below the diagonal return the conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl DensityMatrix {
    /// Build from explicit upper-triangle entries, validating the trace and
    /// the reality of the diagonal.
    pub fn from_entries(
        dim: usize,
        entries: BTreeMap<(usize, usize), Complex64>,
        tol: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let mut trace = 0.0;
        for (&(r, c), v) in &entries {
            if r < 1 || c < 1 || r > dim || c > dim {
                return Err(Error::invalid(format!(
                    "entry ({r}, {c}) out of range for dim {dim}"
                )));
            }
            if r > c {
                return Err(Error::invalid(format!(
                    "entry ({r}, {c}) below the diagonal; store row <= col"
                )));
            }
            if r == c {
                if v.im.abs() > tol {
                    return Err(Error::MalformedState(format!(
                        "diagonal entry ({r}, {r}) has imaginary part {}",
                        v.im
                    )));
                }
                if v.re < -tol {
                    return Err(Error::MalformedState(format!(
                        "diagonal entry ({r}, {r}) = {} is negative",
                        v.re
                    )));
                }
                trace += v.re;
            }
        }
        if (trace - 1.0).abs() > tol {
            return Err(Error::MalformedState(format!(
                "trace = {trace}, expected 1"
            )));
        }
        Ok(DensityMatrix { dim, entries })
    }

    /// Build from a dense row-major matrix, validating Hermiticity.
    pub fn from_dense(dim: usize, data: &[Complex64], tol: f64) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut entries = BTreeMap::new();
        for r in 0..dim {
            for c in r..dim {
                let v = data[r * dim + c];
                let mirror = data[c * dim + r];
                if (v - mirror.conj()).norm() > tol {
                    return Err(Error::MalformedState(format!(
                        "matrix is not Hermitian at ({}, {})",
                        r + 1,
                        c + 1
                    )));
                }
                if v != zero {
                    entries.insert((r + 1, c + 1), v);
                }
            }
        }
        DensityMatrix::from_entries(dim, entries, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored upper-triangle entries.
    pub fn entries(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.entries
    }

    /// Element read honoring sparsity and Hermiticity: absent entries are 0,
    /// lower-triangle reads return the conjugate of the stored value.
    pub fn element(&self, row: usize, col: usize) -> Result<Complex64> {
        if row < 1 || col < 1 || row > self.dim || col > self.dim {
            return Err(Error::invalid(format!(
                "index ({row}, {col}) out of range 1..={}",
                self.dim
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        if row <= col {
            Ok(self.entries.get(&(row, col)).copied().unwrap_or(zero))
        } else {
            Ok(self
                .entries
                .get(&(col, row))
                .map(|v| v.conj())
                .unwrap_or(zero))
        }
    }

    pub fn diagonal(&self, index: usize) -> Result<f64> {
        Ok(self.element(index, index)?.re)
    }

    pub fn trace(&self) -> f64 {
        self.entries
            .iter()
            .filter(|((r, c), _)| r == c)
            .map(|(_, v)| v.re)
            .sum()
    }
}

/// `(1 - p) |psi><psi| + p I / d^N`, kept sparse.
///
/// The diagonal mix-in is computed as `p * (1/d^N)` and the projector part as
/// `(1 - p) * a_r conj(a_c)` so that entrywise the result is bit-exactly the
/// affine interpolation between the p = 0 and p = 1 matrices.
pub fn white_noise_mixture(psi: &PureState, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "noise fraction p = {p} outside [0, 1]"
        )));
    }
    let dim = psi.dim();
    let mut entries: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    let purity = 1.0 - p;
    if purity != 0.0 {
        let indexed: Vec<(usize, Complex64)> = psi
            .amplitudes()
            .iter()
            .map(|(label, amp)| (label.one_based_index(psi.d()), *amp))
            .collect();
        for (i, &(r, ar)) in indexed.iter().enumerate() {
            for &(c, ac) in &indexed[i..] {
                entries.insert((r, c), purity * (ar * ac.conj()));
            }
        }
    }
    if p != 0.0 {
        let mix = Complex64::new(p * (1.0 / dim as f64), 0.0);
        for r in 1..=dim {
            *entries.entry((r, r)).or_insert(Complex64::new(0.0, 0.0)) += mix;
        }
    }
    DensityMatrix::from_entries(dim, entries, STATE_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn label_index(bits: &str) -> usize {
        let digits: Vec<u8> = bits.bytes().map(|b| b - b'0').collect();
        BasisLabel::new(digits, 2).unwrap().one_based_index(2)
    }

    #[test]
    fn one_based_index_matches_bit_position_form() {
        // ones at bit positions {0, 1} (counted from the last qubit) -> 4
        let label = BasisLabel::from_bit_positions(4, &[0, 1]).unwrap();
        assert_eq!(label.digits(), &[0, 0, 1, 1]);
        assert_eq!(label.one_based_index(2), 4);
        assert_eq!(label_index("0101"), 6);
    }

    #[test]
    fn index_roundtrip_qutrits() {
        for idx in 1..=27 {
            let label = BasisLabel::from_one_based(idx, 3, 3).unwrap();
            assert_eq!(label.one_based_index(3), idx);
        }
    }

    #[test]
    fn label_rejects_bad_digits() {
        assert!(BasisLabel::new(vec![0, 2], 2).is_err());
        assert!(BasisLabel::new(vec![], 2).is_err());
        assert!(BasisLabel::from_one_based(0, 2, 2).is_err());
        assert!(BasisLabel::from_one_based(5, 2, 2).is_err());
    }

    #[test]
    fn dicke_4_3_matches_known_expansion() {
        let psi = dicke_state(4, 3).unwrap();
        assert_eq!(psi.support_size(), 4);
        for bits in ["0111", "1011", "1101", "1110"] {
            let digits: Vec<u8> = bits.bytes().map(|b| b - b'0').collect();
            let a = psi.amplitude(&BasisLabel::new(digits, 2).unwrap());
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dicke_no_excitations_is_vacuum() {
        let psi = dicke_state(5, 0).unwrap();
        assert_eq!(psi.support_size(), 1);
        let vacuum = BasisLabel::new(vec![0; 5], 2).unwrap();
        assert_abs_diff_eq!(psi.amplitude(&vacuum).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dicke_4_2_has_six_labels() {
        let psi = dicke_state(4, 2).unwrap();
        assert_eq!(psi.support_size(), binomial(4, 2) as usize);
        let expected = 1.0 / 6.0f64.sqrt();
        for amp in psi.amplitudes().values() {
            assert_abs_diff_eq!(amp.re, expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn dicke_rejects_bad_arguments() {
        assert!(dicke_state(0, 0).is_err());
        assert!(dicke_state(3, 4).is_err());
    }

    #[test]
    fn w_state_3_matches_known_expansion() {
        let psi = qudit_w_state(3).unwrap();
        assert_eq!(psi.support_size(), 6);
        let amp = 1.0 / 6.0f64.sqrt();
        for s in ["012", "021", "102", "120", "201", "210"] {
            let digits: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
            let a = psi.amplitude(&BasisLabel::new(digits, 3).unwrap());
            assert_abs_diff_eq!(a.re, amp, epsilon = 1e-15);
        }
    }

    #[test]
    fn w_state_4_spans_all_permutations() {
        let psi = qudit_w_state(4).unwrap();
        assert_eq!(psi.support_size(), 24);
        let first = BasisLabel::new(vec![0, 1, 2, 3], 4).unwrap();
        let last = BasisLabel::new(vec![3, 2, 1, 0], 4).unwrap();
        let amp = 1.0 / 24.0f64.sqrt();
        assert_abs_diff_eq!(psi.amplitude(&first).re, amp, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitude(&last).re, amp, epsilon = 1e-15);
    }

    #[test]
    fn w_state_single_subsystem() {
        let psi = qudit_w_state(1).unwrap();
        assert_eq!(psi.support_size(), 1);
        assert_eq!(psi.dim(), 1);
        assert!(qudit_w_state(0).is_err());
    }

    #[test]
    fn white_noise_extremes() {
        let psi = dicke_state(3, 1).unwrap();
        let pure = white_noise_mixture(&psi, 0.0).unwrap();
        // pure projector: support diag 1/3, nothing off the support
        assert_abs_diff_eq!(pure.diagonal(2).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pure.diagonal(1).unwrap(), 0.0, epsilon = 1e-15);

        let mixed = white_noise_mixture(&psi, 1.0).unwrap();
        for r in 1..=8 {
            assert_abs_diff_eq!(mixed.diagonal(r).unwrap(), 1.0 / 8.0, epsilon = 1e-15);
        }
        for (r, c) in mixed.entries().keys() {
            assert_eq!(r, c, "maximally mixed state must be diagonal");
        }
    }

    #[test]
    fn white_noise_diagonal_value() {
        // |D_2^4>, p = 0.5: diagonal at index of 0011 is 0.5/6 + 0.5/16
        let psi = dicke_state(4, 2).unwrap();
        let rho = white_noise_mixture(&psi, 0.5).unwrap();
        let idx = label_index("0011");
        assert_eq!(idx, 4);
        let expected = 0.5 * (1.0 / 6.0) + 0.5 * (1.0 / 16.0);
        assert_abs_diff_eq!(rho.diagonal(idx).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn white_noise_rejects_bad_fraction() {
        let psi = dicke_state(2, 1).unwrap();
        assert!(white_noise_mixture(&psi, -0.1).is_err());
        assert!(white_noise_mixture(&psi, 1.1).is_err());
    }

    #[test]
    fn element_reads() {
        let psi = dicke_state(4, 2).unwrap();
        let rho = white_noise_mixture(&psi, 0.0).unwrap();
        // 4 = index of 0011, 6 = index of 0101: product of amplitudes
        let v = rho.element(4, 6).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / 6.0, epsilon = 1e-12);
        // Hermitian conjugate read
        let lower = rho.element(6, 4).unwrap();
        assert_eq!(lower, v.conj());
        // absent entry is zero
        assert_eq!(rho.element(1, 2).unwrap(), Complex64::new(0.0, 0.0));
        // out of range
        assert!(rho.element(0, 1).is_err());
        assert!(rho.element(1, 17).is_err());
    }

    #[test]
    fn trace_is_one_for_constructed_states() {
        for (n, m) in [(2, 1), (4, 2), (5, 3)] {
            let psi = dicke_state(n, m).unwrap();
            for p in [0.0, 0.3, 1.0] {
                let rho = white_noise_mixture(&psi, p).unwrap();
                assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
            }
        }
        let w = qudit_w_state(3).unwrap();
        let rho = white_noise_mixture(&w, 0.25).unwrap();
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn white_noise_is_affine_in_p_exactly() {
        let psi = dicke_state(4, 2).unwrap();
        let rho0 = white_noise_mixture(&psi, 0.0).unwrap();
        let rho1 = white_noise_mixture(&psi, 1.0).unwrap();
        for p in [0.125, 0.3, 0.5, 0.77] {
            let rho = white_noise_mixture(&psi, p).unwrap();
            let mut keys: std::collections::BTreeSet<(usize, usize)> =
                rho.entries().keys().copied().collect();
            keys.extend(rho0.entries().keys());
            keys.extend(rho1.entries().keys());
            for (r, c) in keys {
                let e0 = rho0.element(r, c).unwrap();
                let e1 = rho1.element(r, c).unwrap();
                let expected = (1.0 - p) * e0 + p * e1;
                assert_eq!(rho.element(r, c).unwrap(), expected, "entry ({r}, {c})");
            }
        }
    }

    #[test]
    fn from_dense_rejects_non_hermitian() {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let bad = vec![o, o, z, z];
        assert!(DensityMatrix::from_dense(2, &bad, 1e-12).is_err());
        let good = vec![o, z, z, z];
        assert!(DensityMatrix::from_dense(2, &good, 1e-12).is_ok());
    }
}
