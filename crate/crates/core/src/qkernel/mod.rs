//! Dense pure-state simulation over labelled qubits.
//!
//! States are small (at most ten qubits appear in any protocol round), so the
//! kernel keeps a flat amplitude vector and applies every operation directly.
//! The first label of a [`PureState`] is the most significant bit of the
//! basis index, so a ket such as `|001101>` over `P Q R S T U` reads left to
//! right in label order.
//!
//! Bell states use the convention
//! `Phi± = (|00> ± |11>)/√2` and `Psi± = (|01> ± |10>)/√2`.

mod conditioned;
mod gates;
mod named;
mod qubit;
mod source;
mod state;

pub use conditioned::BranchAction;
pub use gates::{hadamard_matrix, pauli_bell_action, BellOutcome, Matrix2, PauliOp};
pub use named::{
    bell_pair, bell_product, chi, omega, prepare_delta, prepare_delta_circuit, prepare_delta_circuit_stages,
    prepare_delta_phase_fixed, superpose, CircuitStages, Sign, DELTA_TERMS,
};
pub use qubit::{labels, QubitId};
pub use source::{choose_uniform, Outcomes, Sampler};
pub use state::PureState;

use thiserror::Error;

/// Absolute tolerance for comparisons that are exact in infinite precision.
pub const EXACT_TOL: f64 = 1e-12;

/// Probabilities at or below this value are treated as impossible branches.
pub const ZERO_PROB: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("qubit label {0} appears more than once")]
    DuplicateLabel(QubitId),
    #[error("qubit label {0} is not part of the state")]
    UnknownLabel(QubitId),
    #[error("states are defined over different qubit labels")]
    LabelMismatch,
    #[error("amplitude vector has length {len}, expected {expected}")]
    BadLength { len: usize, expected: usize },
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("Bell outcome {outcome} has zero probability on ({a}, {b})")]
    ZeroProbability {
        a: QubitId,
        b: QubitId,
        outcome: BellOutcome,
    },
    #[error("pair ({a}, {b}) is not in a product Bell state {outcome}")]
    NotSeparable {
        a: QubitId,
        b: QubitId,
        outcome: BellOutcome,
    },
    #[error("a qubit pair needs two distinct labels, got {0} twice")]
    DegeneratePair(QubitId),
}

pub type Result<T, E = KernelError> = std::result::Result<T, E>;
