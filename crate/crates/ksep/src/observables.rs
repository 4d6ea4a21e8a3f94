//! Local measurement decompositions of the matrix elements referenced by the
//! criteria.
//!
//! For qubits, off-diagonal elements come from `(XX + YY)`-type products
//! tensored with signed identity/Z patterns and diagonal elements from the
//! full signed identity/Z expansion; the sign of each product term is
//! `(-1)^s` where `s` counts the subsystems whose basis digit is 1 *and*
//! whose pattern factor is Z. For qudits the same roles are played by the
//! generalized Gell-Mann pairs (lambda, mu) and by basis projectors.
//!
//! Normalization convention, fixed by exact reconstruction on random states:
//! the real-part set has expectation `2 Re rho[row, col]`, the imaginary-part
//! set `2 Im rho[row, col]`, and a diagonal set `rho[row, row]`.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::comb::{binomial, factorial};
use crate::criteria::{dicke, qudit_w};
use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::state::{dimension, BasisLabel, DensityMatrix};

/// Single-subsystem operator label.
///
/// `X`, `Y`, `Z` are the qubit Pauli operators; `Lambda(j, k)`, `Mu(j, k)`
/// and `Eta(l)` are the symmetric, antisymmetric and diagonal generalized
/// Gell-Mann matrices; `Proj(j)` is the basis projector |j><j|. `I` is the
/// identity of whatever local dimension the context supplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalOp {
    I,
    X,
    Y,
    Z,
    Lambda(u8, u8),
    Mu(u8, u8),
    Eta(u8),
    Proj(u8),
}

impl LocalOp {
    fn validate(&self, d: usize) -> Result<()> {
        let ok = match *self {
            LocalOp::I => true,
            LocalOp::X | LocalOp::Y | LocalOp::Z => d == 2,
            LocalOp::Lambda(j, k) | LocalOp::Mu(j, k) => {
                (j as usize) < (k as usize) && (k as usize) < d
            }
            LocalOp::Eta(l) => (l as usize) + 2 <= d,
            LocalOp::Proj(j) => (j as usize) < d,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "operator {self} invalid for local dimension {d}"
            )))
        }
    }

    /// Matrix entry at zero-based (row, col).
    fn entry(&self, row: usize, col: usize) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match *self {
            LocalOp::I => {
                if row == col {
                    one
                } else {
                    zero
                }
            }
            LocalOp::X => {
                if row != col {
                    one
                } else {
                    zero
                }
            }
            LocalOp::Y => match (row, col) {
                (0, 1) => Complex64::new(0.0, -1.0),
                (1, 0) => Complex64::new(0.0, 1.0),
                _ => zero,
            },
            LocalOp::Z => match (row, col) {
                (0, 0) => one,
                (1, 1) => -one,
                _ => zero,
            },
            LocalOp::Lambda(j, k) => {
                let (j, k) = (j as usize, k as usize);
                if (row, col) == (j, k) || (row, col) == (k, j) {
                    one
                } else {
                    zero
                }
            }
            LocalOp::Mu(j, k) => {
                let (j, k) = (j as usize, k as usize);
                if (row, col) == (j, k) {
                    Complex64::new(0.0, -1.0)
                } else if (row, col) == (k, j) {
                    Complex64::new(0.0, 1.0)
                } else {
                    zero
                }
            }
            LocalOp::Eta(l) => {
                let l = l as usize;
                if row != col {
                    return zero;
                }
                let scale = (2.0 / ((l + 1) as f64 * (l + 2) as f64)).sqrt();
                if row <= l {
                    Complex64::new(scale, 0.0)
                } else if row == l + 1 {
                    Complex64::new(-scale * (l + 1) as f64, 0.0)
                } else {
                    zero
                }
            }
            LocalOp::Proj(j) => {
                if row == col && row == j as usize {
                    one
                } else {
                    zero
                }
            }
        }
    }

    /// Dense matrix of the operator for local dimension d.
    pub fn matrix(&self, d: usize) -> Result<CMatrix> {
        self.validate(d)?;
        let mut m = CMatrix::zeros(d);
        for r in 0..d {
            for c in 0..d {
                m.set(r, c, self.entry(r, c));
            }
        }
        Ok(m)
    }
}

impl fmt::Display for LocalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LocalOp::I => write!(f, "I"),
            LocalOp::X => write!(f, "X"),
            LocalOp::Y => write!(f, "Y"),
            LocalOp::Z => write!(f, "Z"),
            LocalOp::Lambda(j, k) => write!(f, "L({j},{k})"),
            LocalOp::Mu(j, k) => write!(f, "M({j},{k})"),
            LocalOp::Eta(l) => write!(f, "E({l})"),
            LocalOp::Proj(j) => write!(f, "P({j})"),
        }
    }
}

/// Real coefficient times a tensor product of single-subsystem operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableTerm {
    pub coefficient: f64,
    /// One factor per subsystem, subsystem 1 first.
    pub factors: Vec<LocalOp>,
}

/// Which matrix-element component a set reconstructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetPart {
    Real,
    Imag,
    Diagonal,
}

/// The full observable for one matrix element (or one component of an
/// off-diagonal element). Assembles to a Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    /// One-based (row, col) of the reconstructed element.
    pub target: (usize, usize),
    pub part: TargetPart,
    pub n: usize,
    pub d: usize,
    pub terms: Vec<ObservableTerm>,
}

impl ObservableSet {
    /// Dense d^n-dimensional matrix of the summed terms.
    pub fn assemble(&self) -> Result<CMatrix> {
        let mut total = CMatrix::zeros(dimension(self.n, self.d)?);
        for term in &self.terms {
            let mut prod = CMatrix::identity(1);
            for op in &term.factors {
                prod = prod.kron(&op.matrix(self.d)?);
            }
            total.add_assign_scaled(Complex64::new(term.coefficient, 0.0), &prod);
        }
        Ok(total)
    }
}

/// Sign rule for identity/Z patterns: the exponent is the number of
/// subsystems whose basis digit is 1 and whose pattern factor is Z.
pub fn sign_exponent(basis: &BasisLabel, pattern: &[LocalOp]) -> Result<u32> {
    if pattern.len() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            got: pattern.len(),
        });
    }
    let mut sum = 0u32;
    for (&digit, op) in basis.digits().iter().zip(pattern) {
        match op {
            LocalOp::I => {}
            LocalOp::Z => {
                if digit > 1 {
                    return Err(Error::invalid("sign rule applies to qubit labels only"));
                }
                sum += digit as u32;
            }
            other => {
                return Err(Error::invalid(format!(
                    "pattern must contain only I and Z, found {other}"
                )));
            }
        }
    }
    Ok(sum)
}

fn parity_sign(s: u32) -> f64 {
    if s.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Diagonal observable for an N-qubit basis row: the signed expansion of the
/// basis projector into all 2^N identity/Z patterns, scaled by 1/2^N.
/// Expectation on any state equals `rho[row, row]`.
pub fn pauli_diag_observable(n: usize, row: usize) -> Result<ObservableSet> {
    let basis = BasisLabel::from_one_based(row, n, 2)?;
    let scale = 1.0 / (1u64 << n) as f64;
    let mut terms = Vec::with_capacity(1 << n);
    for mask in 0u64..(1 << n) {
        let factors: Vec<LocalOp> = (0..n)
            .map(|pos| {
                if mask >> (n - 1 - pos) & 1 == 1 {
                    LocalOp::Z
                } else {
                    LocalOp::I
                }
            })
            .collect();
        let sign = parity_sign(sign_exponent(&basis, &factors)?);
        terms.push(ObservableTerm {
            coefficient: sign * scale,
            factors,
        });
    }
    Ok(ObservableSet {
        target: (row, row),
        part: TargetPart::Diagonal,
        n,
        d: 2,
        terms,
    })
}

/// Locate the two differing positions of a criterion-shaped pair and check
/// the digits are swapped there. Returns (i, j, low digit, high digit) with
/// zero-based positions i < j; the row label holds the low digit at i.
fn swap_shape(n: usize, d: usize, row: usize, col: usize) -> Result<(usize, usize, u8, u8)> {
    if row >= col {
        return Err(Error::invalid(format!(
            "off-diagonal target needs row < col, got ({row}, {col})"
        )));
    }
    let r = BasisLabel::from_one_based(row, n, d)?;
    let c = BasisLabel::from_one_based(col, n, d)?;
    let diff: Vec<usize> = (0..n).filter(|&i| r.digits()[i] != c.digits()[i]).collect();
    if diff.len() != 2 {
        return Err(Error::invalid(format!(
            "labels of ({row}, {col}) differ in {} positions, need exactly 2",
            diff.len()
        )));
    }
    let (i, j) = (diff[0], diff[1]);
    let (ri, rj) = (r.digits()[i], r.digits()[j]);
    let (ci, cj) = (c.digits()[i], c.digits()[j]);
    if ri != cj || rj != ci {
        return Err(Error::invalid(format!(
            "labels of ({row}, {col}) do not swap a digit pair"
        )));
    }
    // row < col forces the smaller digit at the more significant position i
    Ok((i, j, ri, ci))
}

/// Observables reconstructing one off-diagonal qubit element of the
/// criterion pair shape (labels swapping a 0/1 across two positions).
/// Expectations: real set `2 Re rho[row, col]`, imaginary set
/// `2 Im rho[row, col]`.
pub fn pauli_offdiag_observables(
    n: usize,
    row: usize,
    col: usize,
) -> Result<(ObservableSet, ObservableSet)> {
    let (i, j, _, _) = swap_shape(n, 2, row, col)?;
    let basis = BasisLabel::from_one_based(row, n, 2)?;
    let fixed: Vec<usize> = (0..n).filter(|&p| p != i && p != j).collect();
    let scale = 1.0 / (1u64 << (n - 1)) as f64;

    let mut real_terms = Vec::new();
    let mut imag_terms = Vec::new();
    for mask in 0u64..(1 << fixed.len()) {
        let mut pattern = vec![LocalOp::I; n];
        for (bit, &pos) in fixed.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                pattern[pos] = LocalOp::Z;
            }
        }
        let sign = parity_sign(sign_exponent(&basis, &pattern)?);
        let with = |a: LocalOp, b: LocalOp, coeff: f64, out: &mut Vec<ObservableTerm>| {
            let mut factors = pattern.clone();
            factors[i] = a;
            factors[j] = b;
            out.push(ObservableTerm {
                coefficient: coeff,
                factors,
            });
        };
        with(LocalOp::X, LocalOp::X, sign * scale, &mut real_terms);
        with(LocalOp::Y, LocalOp::Y, sign * scale, &mut real_terms);
        with(LocalOp::X, LocalOp::Y, sign * scale, &mut imag_terms);
        with(LocalOp::Y, LocalOp::X, -sign * scale, &mut imag_terms);
    }

    Ok((
        ObservableSet {
            target: (row, col),
            part: TargetPart::Real,
            n,
            d: 2,
            terms: real_terms,
        },
        ObservableSet {
            target: (row, col),
            part: TargetPart::Imag,
            n,
            d: 2,
            terms: imag_terms,
        },
    ))
}

/// The d^2 - 1 generalized Gell-Mann matrices with their labels, ordered
/// lambda block, mu block, eta block. For d = 2 these are X, Y, Z.
pub fn ggm_basis(d: usize) -> Result<Vec<(LocalOp, CMatrix)>> {
    if d < 2 {
        return Err(Error::invalid("local dimension must be at least 2"));
    }
    if d > 64 {
        return Err(Error::invalid("local dimension capped at 64"));
    }
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d as u8 {
        for k in j + 1..d as u8 {
            let op = LocalOp::Lambda(j, k);
            out.push((op, op.matrix(d)?));
        }
    }
    for j in 0..d as u8 {
        for k in j + 1..d as u8 {
            let op = LocalOp::Mu(j, k);
            out.push((op, op.matrix(d)?));
        }
    }
    for l in 0..(d - 1) as u8 {
        let op = LocalOp::Eta(l);
        out.push((op, op.matrix(d)?));
    }
    Ok(out)
}

/// Expand |j><k| into generalized Gell-Mann matrices (plus identity for the
/// diagonal case). The assembled combination equals the elementary matrix
/// unit exactly.
pub fn ketbra_decomposition(j: usize, k: usize, d: usize) -> Result<Vec<(Complex64, LocalOp)>> {
    if d < 2 {
        return Err(Error::invalid("local dimension must be at least 2"));
    }
    if j >= d || k >= d {
        return Err(Error::invalid(format!(
            "levels ({j}, {k}) out of range for d = {d}"
        )));
    }
    let half = Complex64::new(0.5, 0.0);
    let half_i = Complex64::new(0.0, 0.5);
    if j < k {
        return Ok(vec![
            (half, LocalOp::Lambda(j as u8, k as u8)),
            (half_i, LocalOp::Mu(j as u8, k as u8)),
        ]);
    }
    if j > k {
        return Ok(vec![
            (half, LocalOp::Lambda(k as u8, j as u8)),
            (-half_i, LocalOp::Mu(k as u8, j as u8)),
        ]);
    }
    // |j><j|: descending eta ladder plus identity/d
    let mut out = Vec::new();
    if j > 0 {
        let coeff = -(j as f64 / (2.0 * (j + 1) as f64)).sqrt();
        out.push((Complex64::new(coeff, 0.0), LocalOp::Eta((j - 1) as u8)));
    }
    if j + 2 <= d {
        for t in 0..=(d - j - 2) {
            let coeff = 1.0 / (2.0 * ((j + t + 1) * (j + t + 2)) as f64).sqrt();
            out.push((Complex64::new(coeff, 0.0), LocalOp::Eta((j + t) as u8)));
        }
    }
    out.push((Complex64::new(1.0 / d as f64, 0.0), LocalOp::I));
    Ok(out)
}

/// Diagonal observable for a qudit basis row: the tensor product of basis
/// projectors. Expectation equals `rho[row, row]`.
pub fn qudit_diag_observable(n: usize, d: usize, row: usize) -> Result<ObservableSet> {
    let basis = BasisLabel::from_one_based(row, n, d)?;
    let factors: Vec<LocalOp> = basis.digits().iter().map(|&x| LocalOp::Proj(x)).collect();
    Ok(ObservableSet {
        target: (row, row),
        part: TargetPart::Diagonal,
        n,
        d,
        terms: vec![ObservableTerm {
            coefficient: 1.0,
            factors,
        }],
    })
}

/// Observables reconstructing one off-diagonal qudit element of the
/// criterion pair shape (labels swapping a digit pair across two positions).
/// Expectations: real set `2 Re rho[row, col]`, imaginary set
/// `2 Im rho[row, col]`.
pub fn qudit_offdiag_observables(
    n: usize,
    d: usize,
    row: usize,
    col: usize,
) -> Result<(ObservableSet, ObservableSet)> {
    let (i, j, low, high) = swap_shape(n, d, row, col)?;
    let basis = BasisLabel::from_one_based(row, n, d)?;
    let projectors: Vec<LocalOp> = basis.digits().iter().map(|&x| LocalOp::Proj(x)).collect();
    let lambda = LocalOp::Lambda(low, high);
    let mu = LocalOp::Mu(low, high);

    let term = |a: LocalOp, b: LocalOp, coeff: f64| {
        let mut factors = projectors.clone();
        factors[i] = a;
        factors[j] = b;
        ObservableTerm {
            coefficient: coeff,
            factors,
        }
    };
    let real_terms = vec![term(lambda, lambda, 0.5), term(mu, mu, 0.5)];
    let imag_terms = vec![term(lambda, mu, 0.5), term(mu, lambda, -0.5)];

    Ok((
        ObservableSet {
            target: (row, col),
            part: TargetPart::Real,
            n,
            d,
            terms: real_terms,
        },
        ObservableSet {
            target: (row, col),
            part: TargetPart::Imag,
            n,
            d,
            terms: imag_terms,
        },
    ))
}

/// Expectation value Tr(rho O) of an observable set, computed directly on
/// the sparse entries without assembling the tensor products.
pub fn expectation(rho: &DensityMatrix, set: &ObservableSet) -> Result<f64> {
    let dim = dimension(set.n, set.d)?;
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: rho.dim(),
        });
    }
    for term in &set.terms {
        if term.factors.len() != set.n {
            return Err(Error::DimensionMismatch {
                expected: set.n,
                got: term.factors.len(),
            });
        }
        for op in &term.factors {
            op.validate(set.d)?;
        }
    }

    // cache digit vectors of the stored entries once
    let entries: Vec<(Vec<u8>, Vec<u8>, Complex64)> = rho
        .entries()
        .iter()
        .map(|(&(r, c), &v)| {
            let rd = BasisLabel::from_one_based(r, set.n, set.d)?
                .digits()
                .to_vec();
            let cd = BasisLabel::from_one_based(c, set.n, set.d)?
                .digits()
                .to_vec();
            Ok((rd, cd, v))
        })
        .collect::<Result<_>>()?;

    let mut total = Complex64::new(0.0, 0.0);
    for term in &set.terms {
        let mut acc = Complex64::new(0.0, 0.0);
        for (rd, cd, v) in &entries {
            // operator entry M[x, y] = prod over positions of factor[x_p, y_p]
            let m_cr = product_entry(&term.factors, cd, rd);
            if rd == cd {
                acc += v * m_cr;
            } else {
                let m_rc = product_entry(&term.factors, rd, cd);
                acc += v * m_cr + v.conj() * m_rc;
            }
        }
        total += term.coefficient * acc;
    }
    Ok(total.re)
}

fn product_entry(factors: &[LocalOp], row: &[u8], col: &[u8]) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for ((op, &r), &c) in factors.iter().zip(row).zip(col) {
        prod *= op.entry(r as usize, c as usize);
        if prod == Complex64::new(0.0, 0.0) {
            break;
        }
    }
    prod
}

/// Reconstruct a matrix element purely from observable expectations:
/// the diagonal set for row = col, the two off-diagonal sets (halved, per
/// the documented normalization) otherwise.
pub fn reconstruct_element(
    rho: &DensityMatrix,
    n: usize,
    d: usize,
    row: usize,
    col: usize,
) -> Result<Complex64> {
    if row == col {
        let set = if d == 2 {
            pauli_diag_observable(n, row)?
        } else {
            qudit_diag_observable(n, d, row)?
        };
        return Ok(Complex64::new(expectation(rho, &set)?, 0.0));
    }
    if row > col {
        return Ok(reconstruct_element(rho, n, d, col, row)?.conj());
    }
    let (re_set, im_set) = if d == 2 {
        pauli_offdiag_observables(n, row, col)?
    } else {
        qudit_offdiag_observables(n, d, row, col)?
    };
    Ok(Complex64::new(
        expectation(rho, &re_set)? / 2.0,
        expectation(rho, &im_set)? / 2.0,
    ))
}

/// Number of local observables needed by the N-qubit criterion:
/// `(N-m)(m/2) C(N,m) 2^(N-1) + 2^N`.
pub fn observable_count_dicke(n: usize, m: usize) -> Result<u128> {
    if n == 0 || m == 0 || m >= n {
        return Err(Error::invalid(format!(
            "excitation count m = {m} outside 1..={} for n = {n}",
            n.saturating_sub(1)
        )));
    }
    let lhs_pairs = (n - m) as u128 * m as u128 * binomial(n as u64, m as u64) / 2;
    Ok(lhs_pairs * (1u128 << (n - 1)) + (1u128 << n))
}

/// Number of local observables needed by the N-qudit criterion:
/// `2N N!/(N-2)! + d^N`.
pub fn observable_count_qudit(n: usize, d: usize) -> Result<u128> {
    if n < 2 {
        return Err(Error::invalid(
            "qudit criterion needs at least 2 subsystems",
        ));
    }
    if d != n {
        return Err(Error::invalid(format!(
            "the qudit W criterion requires d = N, got d = {d}, N = {n}"
        )));
    }
    let off = 2 * n as u128 * (factorial(n as u64) / factorial((n - 2) as u64));
    let diag = (d as u128).pow(n as u32);
    Ok(off + diag)
}

/// Distinct local-operator patterns emitted by the qubit observable
/// constructors over every element the criterion references.
pub fn dicke_pattern_inventory(n: usize, m: usize) -> Result<BTreeSet<Vec<LocalOp>>> {
    if m == 0 || m >= n {
        return Err(Error::invalid(format!(
            "excitation count m = {m} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    let sets = dicke::index_sets(n, m)?;
    let mut inventory = BTreeSet::new();
    for &(row, col) in &sets.lhs_pairs {
        let (re, im) = pauli_offdiag_observables(n, row, col)?;
        for term in re.terms.into_iter().chain(im.terms) {
            inventory.insert(term.factors);
        }
    }
    let mut diag_rows: BTreeSet<usize> = sets.diag_indices.iter().copied().collect();
    for &(a, b) in &sets.sqrt_pairs {
        diag_rows.insert(a);
        diag_rows.insert(b);
    }
    for row in diag_rows {
        for term in pauli_diag_observable(n, row)?.terms {
            inventory.insert(term.factors);
        }
    }
    Ok(inventory)
}

/// Distinct local-operator patterns emitted by the qudit observable
/// constructors: Gell-Mann pair patterns per referenced off-diagonal plus
/// the full projector readout family.
pub fn qudit_pattern_inventory(n: usize) -> Result<BTreeSet<Vec<LocalOp>>> {
    let sets = qudit_w::index_sets(n)?;
    let mut inventory = BTreeSet::new();
    for &(row, col) in &sets.lhs_pairs {
        let (re, im) = qudit_offdiag_observables(n, n, row, col)?;
        for term in re.terms.into_iter().chain(im.terms) {
            inventory.insert(term.factors);
        }
    }
    for row in 1..=dimension(n, n)? {
        for term in qudit_diag_observable(n, n, row)?.terms {
            inventory.insert(term.factors);
        }
    }
    Ok(inventory)
}
