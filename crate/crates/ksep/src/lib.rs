//! Detection of non-k-separability and genuine multipartite entanglement in
//! Dicke-class and N-qudit W-class mixed states.
//!
//! The library builds the relevant pure states and white-noise mixtures,
//! evaluates two density-matrix-element inequalities (an N-qubit one tuned to
//! Dicke states with m excitations and an N-qudit one, d = N, tuned to the
//! W class), provides the closed-form detection functions and white-noise
//! tolerances of both noisy families, enumerates and counts k-partitions,
//! samples random k-separable mixed states as a falsification oracle, and
//! decomposes every referenced matrix element into local observables (Pauli
//! products for qubits, generalized Gell-Mann products for qudits).
//!
//! Everything is a pure function over immutable values; all sampling takes an
//! explicit seed.

pub mod comb;
pub mod criteria;
pub mod dense;
pub mod error;
pub mod noise;
pub mod observables;
pub mod partitions;
pub mod state;

pub use criteria::{CriterionReport, VIOLATION_TOLERANCE};
pub use error::{Error, Result};
pub use state::{
    dicke_state, qudit_w_state, white_noise_mixture, BasisLabel, DensityMatrix, PureState,
    STATE_TOLERANCE,
};
