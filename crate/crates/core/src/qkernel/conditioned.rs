use num_complex::Complex64;

use super::gates::{BellOutcome, PauliOp};
use super::qubit::QubitId;
use super::state::PureState;
use super::{KernelError, Result};

/// Operator `Σ_B phase_B |B><B|_control ⊗ U_B` where each `U_B` is a product
/// of single-qubit Paulis on qubits outside the control pair.
///
/// Phases are restricted to the fourth roots of unity, so the operator is
/// unitary whenever the target labels avoid the control pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchAction {
    branches: [(Complex64, Vec<(QubitId, PauliOp)>); 4],
}

impl Default for BranchAction {
    fn default() -> Self {
        Self::identity()
    }
}

impl BranchAction {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        BranchAction {
            branches: [
                (one, Vec::new()),
                (one, Vec::new()),
                (one, Vec::new()),
                (one, Vec::new()),
            ],
        }
    }

    /// Sets the branch for `outcome`. `phase` must be one of `±1, ±i`.
    pub fn with_branch(mut self, outcome: BellOutcome, phase: Complex64, ops: Vec<(QubitId, PauliOp)>) -> Self {
        let quarter_turn = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        assert!(
            quarter_turn.iter().any(|p| (p - phase).norm() < 1e-15),
            "branch phase must be ±1 or ±i"
        );
        self.branches[outcome.index()] = (phase, ops);
        self
    }

    pub fn branch(&self, outcome: BellOutcome) -> (Complex64, &[(QubitId, PauliOp)]) {
        let (phase, ops) = &self.branches[outcome.index()];
        (*phase, ops)
    }
}

impl PureState {
    /// Applies a Bell-subspace-controlled operation.
    pub fn apply_bell_conditioned(&self, control: (QubitId, QubitId), action: &BranchAction) -> Result<Self> {
        if control.0 == control.1 {
            return Err(KernelError::DegeneratePair(control.0));
        }
        for (_, ops) in &action.branches {
            for &(q, _) in ops {
                if q == control.0 || q == control.1 {
                    return Err(KernelError::DuplicateLabel(q));
                }
                if !self.contains(q) {
                    return Err(KernelError::UnknownLabel(q));
                }
            }
        }
        let dim = self.amplitudes().len();
        let mut acc = vec![Complex64::new(0.0, 0.0); dim];
        let probs = self.bell_distribution(control)?;
        for b in BellOutcome::ALL {
            if probs[b.index()] <= super::ZERO_PROB {
                continue;
            }
            // The projection is renormalized; undo that to keep the branch
            // weight.
            let (p, projected) = self.project_bell(control, b)?;
            let (phase, ops) = action.branch(b);
            let moved = projected.apply_paulis(ops)?;
            let scale = phase * p.sqrt();
            for (slot, a) in acc.iter_mut().zip(moved.amplitudes()) {
                *slot += scale * a;
            }
        }
        PureState::new(self.labels().to_vec(), acc)
    }
}
