//! One round of the entanglement-swapping key exchange.
//!
//! Alice prepares `Phi+_12`, Bob prepares `Phi+_34`, and they swap qubits 2
//! and 3. Alice applies a secret Pauli `σ_A` to qubit 1 and Bell-measures
//! `(1, 3)`; Bob Bell-measures `(2, 4)`. Alice's outcome alone is uniformly
//! random, but Bob's outcome is `σ_A` applied to it, so once Alice announces
//! her result Bob can deduce `σ_A`. The raw key is the operation bits
//! followed by Bob's result bits.
//!
//! In the modified variant Alice applies `H` to qubit 1 with probability 1/2
//! before `σ_A`, announces the choice after her measurement, and Bob undoes
//! it on qubit 2 before measuring.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::adversary::EveRecord;
use crate::qkernel::labels::{Q1, Q2, Q3, Q4};
use crate::qkernel::{
    bell_pair, choose_uniform, pauli_bell_action, BellOutcome, Outcomes, PauliOp, PureState, QubitId,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Original,
    Modified,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Original => "original",
            Variant::Modified => "modified",
        })
    }
}

/// How the two Bell pairs reach the parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Each party prepares one pair; qubit 2 goes to Bob, qubit 3 to Alice.
    Exchange,
    /// Alice prepares both pairs and sends qubits 2 and 4 to Bob.
    AlicePreparesBoth,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Exchange => "exchange",
            Distribution::AlicePreparesBoth => "alice-prepares-both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice<T> {
    Fixed(T),
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundConfig {
    pub variant: Variant,
    pub distribution: Distribution,
    pub alice_pauli: Choice<PauliOp>,
    /// Ignored for [`Variant::Original`].
    pub hadamard: Choice<bool>,
}

impl RoundConfig {
    pub fn new(variant: Variant) -> Self {
        RoundConfig {
            variant,
            distribution: Distribution::Exchange,
            alice_pauli: Choice::Uniform,
            hadamard: Choice::Uniform,
        }
    }

    pub fn with_distribution(mut self, distribution: Distribution) -> Self {
        self.distribution = distribution;
        self
    }

    pub fn with_pauli(mut self, p: PauliOp) -> Self {
        self.alice_pauli = Choice::Fixed(p);
        self
    }

    pub fn with_hadamard(mut self, applied: bool) -> Self {
        self.hadamard = Choice::Fixed(applied);
        self
    }
}

/// Four raw-key bits: two for the Pauli operation followed by two for Bob's
/// Bell outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyBits(u8);

impl KeyBits {
    pub fn new(op: PauliOp, result: BellOutcome) -> Self {
        KeyBits((op.bits() << 2) | result.bits())
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl fmt::Display for KeyBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.0)
    }
}

impl Serialize for KeyBits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTranscript {
    pub alice_pauli: PauliOp,
    pub hadamard_flag: bool,
    pub alice_result: BellOutcome,
    pub bob_result: BellOutcome,
    pub imaginary_result: BellOutcome,
    pub bob_deduced_pauli: PauliOp,
    pub key_bits: KeyBits,
    pub eve: Option<EveRecord>,
    pub detected: bool,
}

impl RoundTranscript {
    pub fn eve_bits(&self) -> Option<KeyBits> {
        self.eve.as_ref().map(|e| e.inferred_bits)
    }
}

/// Mutable view of the joint state handed to channel hooks.
pub struct Link<'a> {
    pub state: &'a mut PureState,
    pub outcomes: &'a mut dyn Outcomes,
}

/// Points in a round where an adversary can act. The default methods pass
/// everything through untouched.
pub trait ChannelHooks {
    /// Replaces the parties' freshly prepared pairs. The returned state must
    /// contain qubits 1 to 4.
    fn prepare(&mut self, _distribution: Distribution) -> Result<Option<PureState>> {
        Ok(None)
    }

    /// A qubit sent by Alice; returns the label Bob will hold in its place.
    fn on_qubit_from_alice(&mut self, _link: &mut Link<'_>, qubit: QubitId) -> Result<QubitId> {
        Ok(qubit)
    }

    /// A qubit sent by Bob; returns the label Alice will hold in its place.
    fn on_qubit_from_bob(&mut self, _link: &mut Link<'_>, qubit: QubitId) -> Result<QubitId> {
        Ok(qubit)
    }

    /// Alice announces that she has measured (but not what).
    fn on_bsm_announcement(&mut self, _link: &mut Link<'_>) -> Result<()> {
        Ok(())
    }

    /// Alice announces whether she applied `H` (modified variant only).
    fn on_h_announcement(&mut self, _link: &mut Link<'_>, _applied: bool) -> Result<()> {
        Ok(())
    }

    /// Alice announces her Bell outcome, after Bob has measured.
    fn on_result_announcement(&mut self, _link: &mut Link<'_>, _alice_result: BellOutcome) -> Result<()> {
        Ok(())
    }

    fn eve_record(&self) -> Option<EveRecord> {
        None
    }
}

/// Pass-through channel.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoAdversary;

impl ChannelHooks for NoAdversary {}

/// The Bell state qubits 1 and 3 would have collapsed to had Alice applied
/// no operation. Unoperated swapping yields matched pairs, so this is Bob's
/// own outcome.
pub fn imaginary_result(bob: BellOutcome) -> BellOutcome {
    bob
}

/// The unique Pauli `p` with `pauli_bell_action(p, alice) == bob`.
pub fn deduce_pauli(alice: BellOutcome, bob: BellOutcome) -> PauliOp {
    PauliOp::ALL
        .into_iter()
        .find(|&p| pauli_bell_action(p, alice) == bob)
        .expect("Pauli action on Bell labels is transitive")
}

pub fn key_bits(p: PauliOp, bob: BellOutcome) -> KeyBits {
    KeyBits::new(p, bob)
}

pub fn run_original_round(
    cfg: &RoundConfig,
    hooks: &mut dyn ChannelHooks,
    outcomes: &mut dyn Outcomes,
) -> Result<RoundTranscript> {
    if cfg.variant != Variant::Original {
        return Err(Error::InvalidParameter(
            "run_original_round needs the original variant".into(),
        ));
    }
    run_round(cfg, hooks, outcomes)
}

pub fn run_modified_round(
    cfg: &RoundConfig,
    hooks: &mut dyn ChannelHooks,
    outcomes: &mut dyn Outcomes,
) -> Result<RoundTranscript> {
    if cfg.variant != Variant::Modified {
        return Err(Error::InvalidParameter(
            "run_modified_round needs the modified variant".into(),
        ));
    }
    run_round(cfg, hooks, outcomes)
}

/// Executes one round of either variant.
pub fn run_round(
    cfg: &RoundConfig,
    hooks: &mut dyn ChannelHooks,
    outcomes: &mut dyn Outcomes,
) -> Result<RoundTranscript> {
    let modified = cfg.variant == Variant::Modified;
    let alice_pauli = match cfg.alice_pauli {
        Choice::Fixed(p) => p,
        Choice::Uniform => choose_uniform(outcomes, &PauliOp::ALL),
    };
    let hadamard_flag = modified
        && match cfg.hadamard {
            Choice::Fixed(h) => h,
            Choice::Uniform => choose_uniform(outcomes, &[false, true]),
        };

    let mut state = match hooks.prepare(cfg.distribution)? {
        Some(s) => s,
        None => bell_pair(Q1, Q2, BellOutcome::PhiPlus)?.tensor(&bell_pair(Q3, Q4, BellOutcome::PhiPlus)?)?,
    };

    macro_rules! link {
        () => {
            &mut Link {
                state: &mut state,
                outcomes: &mut *outcomes,
            }
        };
    }

    let (alice_pair, bob_pair) = match cfg.distribution {
        Distribution::Exchange => {
            let at_bob = hooks.on_qubit_from_alice(link!(), Q2)?;
            let at_alice = hooks.on_qubit_from_bob(link!(), Q3)?;
            ((Q1, at_alice), (at_bob, Q4))
        }
        Distribution::AlicePreparesBoth => {
            let second = hooks.on_qubit_from_alice(link!(), Q2)?;
            let fourth = hooks.on_qubit_from_alice(link!(), Q4)?;
            ((Q1, Q3), (second, fourth))
        }
    };

    if hadamard_flag {
        state = state.apply_hadamard(Q1)?;
    }
    state = state.apply_pauli(Q1, alice_pauli)?;
    let (alice_result, post) = state.measure_bell_and_detach(alice_pair, outcomes)?;
    state = post;

    hooks.on_bsm_announcement(link!())?;
    if modified {
        hooks.on_h_announcement(link!(), hadamard_flag)?;
    }

    if hadamard_flag {
        state = state.apply_hadamard(bob_pair.0)?;
    }
    let (bob_result, post) = state.measure_bell_and_detach(bob_pair, outcomes)?;
    state = post;

    hooks.on_result_announcement(link!(), alice_result)?;

    let imaginary = imaginary_result(bob_result);
    let bob_deduced_pauli = deduce_pauli(alice_result, imaginary);
    Ok(RoundTranscript {
        alice_pauli,
        hadamard_flag,
        alice_result,
        bob_result,
        imaginary_result: imaginary,
        bob_deduced_pauli,
        key_bits: key_bits(bob_deduced_pauli, bob_result),
        eve: hooks.eve_record(),
        detected: bob_deduced_pauli != alice_pauli,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::Sampler;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use BellOutcome::*;

    /// Replays a fixed list of branch indices.
    struct Script(Vec<usize>);

    impl Outcomes for Script {
        fn choose(&mut self, weights: &[f64]) -> usize {
            let i = self.0.remove(0);
            assert!(weights[i] > 1e-12, "scripted branch {i} is impossible: {weights:?}");
            i
        }
    }

    #[test]
    fn fig_walkthrough_sigma_x() {
        let cfg = RoundConfig::new(Variant::Original).with_pauli(PauliOp::X);
        // Alice's outcome Psi- (index 3); Bob's branch is forced.
        let mut probs = None;
        struct Spy<'a>(&'a mut Option<Vec<f64>>, Vec<usize>);
        impl Outcomes for Spy<'_> {
            fn choose(&mut self, weights: &[f64]) -> usize {
                if self.1.is_empty() {
                    *self.0 = Some(weights.to_vec());
                    return weights.iter().position(|&w| w > 0.5).unwrap();
                }
                self.1.remove(0)
            }
        }
        let t = run_original_round(&cfg, &mut NoAdversary, &mut Spy(&mut probs, vec![3])).unwrap();
        assert_eq!(t.alice_result, PsiMinus);
        assert_eq!(t.bob_result, PhiMinus);
        assert_eq!(t.bob_deduced_pauli, PauliOp::X);
        assert_eq!(t.key_bits.to_string(), "0101");
        assert!(!t.detected);
        let bob_probs = probs.unwrap();
        assert!((bob_probs[PhiMinus.index()] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_pauli_gives_matched_results() {
        for b in 0..4 {
            let cfg = RoundConfig::new(Variant::Original).with_pauli(PauliOp::I);
            let t = run_original_round(&cfg, &mut NoAdversary, &mut Script(vec![b, b])).unwrap();
            assert_eq!(t.alice_result, t.bob_result);
            assert_eq!(t.bob_deduced_pauli, PauliOp::I);
        }
    }

    #[test]
    fn honest_rounds_are_never_flagged() {
        let mut rng = Sampler::new(ChaCha8Rng::seed_from_u64(11));
        for variant in [Variant::Original, Variant::Modified] {
            let cfg = RoundConfig::new(variant);
            let detected = (0..1000)
                .filter(|_| run_round(&cfg, &mut NoAdversary, &mut rng).unwrap().detected)
                .count();
            assert_eq!(detected, 0, "{variant}");
        }
    }

    #[test]
    fn hadamard_round_restores_correlation() {
        let cfg = RoundConfig::new(Variant::Modified)
            .with_pauli(PauliOp::X)
            .with_hadamard(true);
        let mut seen_bob = None;
        struct Spy<'a>(&'a mut Option<Vec<f64>>, usize);
        impl Outcomes for Spy<'_> {
            fn choose(&mut self, weights: &[f64]) -> usize {
                self.1 += 1;
                if self.1 == 1 {
                    return 3;
                }
                *self.0 = Some(weights.to_vec());
                weights.iter().position(|&w| w > 1e-12).unwrap()
            }
        }
        let t = run_modified_round(&cfg, &mut NoAdversary, &mut Spy(&mut seen_bob, 0)).unwrap();
        assert_eq!(t.alice_result, PsiMinus);
        assert_eq!(t.bob_result, PhiMinus);
        assert!((seen_bob.unwrap()[PhiMinus.index()] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn variant_preconditions() {
        let cfg = RoundConfig::new(Variant::Modified);
        let mut rng = Sampler::new(ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(
            run_original_round(&cfg, &mut NoAdversary, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
        let cfg = RoundConfig::new(Variant::Original).with_hadamard(true);
        assert!(matches!(
            run_modified_round(&cfg, &mut NoAdversary, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
        // the flag is ignored by the original protocol
        let t = run_original_round(&cfg, &mut NoAdversary, &mut rng).unwrap();
        assert!(!t.hadamard_flag);
    }

    #[test]
    fn imaginary_result_is_bobs_outcome() {
        assert_eq!(imaginary_result(PsiMinus), PsiMinus);
        assert_eq!(imaginary_result(PhiPlus), PhiPlus);
        assert_eq!(imaginary_result(PhiMinus), PhiMinus);
    }

    #[test]
    fn deduce_examples() {
        assert_eq!(deduce_pauli(PsiMinus, PhiMinus), PauliOp::X);
        assert_eq!(deduce_pauli(PsiMinus, PsiPlus), PauliOp::Z);
        for b in BellOutcome::ALL {
            assert_eq!(deduce_pauli(b, b), PauliOp::I);
        }
    }

    #[test]
    fn deduce_inverts_action() {
        for a in BellOutcome::ALL {
            for p in PauliOp::ALL {
                assert_eq!(deduce_pauli(a, pauli_bell_action(p, a)), p);
            }
        }
    }

    #[test]
    fn key_bit_examples() {
        assert_eq!(key_bits(PauliOp::X, PsiMinus).to_string(), "0111");
        assert_eq!(key_bits(PauliOp::I, PhiPlus).to_string(), "0000");
        assert_eq!(key_bits(PauliOp::Z, PsiPlus).to_string(), "1110");
    }

    #[test]
    fn raw_key_is_uniform_over_sixteen_values() {
        let mut seen = std::collections::HashSet::new();
        for p in PauliOp::ALL {
            for b in BellOutcome::ALL {
                seen.insert(key_bits(p, b));
            }
        }
        assert_eq!(seen.len(), 16);
    }
}
