//! Simulator for quantum key distribution by entanglement swapping.
//!
//! The crate is layered bottom-up:
//!
//! * [`qkernel`]: dense pure-state simulation with Bell-basis measurement.
//! * [`protocol`]: one round of the original exchange protocol or its
//!   Hadamard-hardened variant, with channel hooks where an eavesdropper
//!   can sit.
//! * [`adversary`]: Eve's strategies implemented as channel hooks.
//! * [`analysis`]: exact branch enumeration and Monte Carlo estimates of
//!   detection probability and key leakage.
//! * [`cli`]: report generation behind the `esqkd` binary.

pub mod adversary;
pub mod analysis;
pub mod cli;
pub mod protocol;
pub mod qkernel;

use thiserror::Error;

use protocol::{Distribution, Variant};
use qkernel::{BellOutcome, KernelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("attack `{attack}` cannot run against the {variant} protocol with {distribution} distribution")]
    Incompatible {
        attack: adversary::AttackKind,
        variant: Variant,
        distribution: Distribution,
    },
    #[error("no Pauli correction restores the resource state after {stage} Bell outcome {outcome}")]
    CorrectionSearch { stage: &'static str, outcome: BellOutcome },
    #[error("branch weight {0} is not a dyadic rational")]
    NonDyadic(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
