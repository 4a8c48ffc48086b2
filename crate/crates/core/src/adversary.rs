//! Eavesdropping strategies, each realised as a set of [`ChannelHooks`].
//!
//! The central attack swaps the parties into Eve's six-qubit resource state
//! `|δ>_PQRSTU`. Eve Bell-measures the transiting qubit 2 with `P` and qubit
//! 3 with `S`, applies Pauli corrections that depend only on her own
//! outcomes, and forwards `R` to Alice and `Q` to Bob. The joint state is
//! then `σ_A(1) |δ>_1QR4TU`: Alice and Bob see the honest correlations, and
//! `(T, U)` ends up in the same Bell state as Bob's pair.
//!
//! Corrections for the second measurement are not written down anywhere;
//! [`derive_second_bsm_corrections`] finds them by searching all Pauli
//! assignments on `R, T, U`. The table it produces for the plain resource
//! state is
//!
//! | outcome on (3, S) | corrections      |
//! |-------------------|------------------|
//! | Phi+              | none             |
//! | Phi-              | `Z_R Z_T`        |
//! | Psi+              | `X_R X_U`        |
//! | Psi-              | `Y_R Z_T X_U`    |

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::protocol::{
    deduce_pauli, imaginary_result, key_bits, ChannelHooks, Distribution, KeyBits, Link, NoAdversary, Variant,
};
use crate::qkernel::labels::{P, PQRSTU, Q, Q1, Q2, Q3, Q4, R, S, T, U};
use crate::qkernel::{bell_pair, choose_uniform, prepare_delta, BellOutcome, PauliOp, PureState, QubitId, EXACT_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    None,
    /// Bell-measure qubits 2 and 4 while Alice sends both to Bob.
    InterceptResend,
    /// Swap both transiting qubits into `|δ>` and correct.
    DeltaSwap,
    /// As `DeltaSwap`, with `H` on `P` and `Q` of the resource beforehand.
    DeltaSwapHPre,
    /// `DeltaSwap` or `DeltaSwapHPre`, picked by a fair coin each round.
    DeltaSwapRandomH,
    /// Hold qubits 2 and 3 until Alice's `H` announcement.
    DelayedMeasurement,
    /// Eve's source hands out `|δ>` in place of the two Bell pairs.
    SourceControl,
}

impl AttackKind {
    pub const ALL: [AttackKind; 7] = [
        AttackKind::None,
        AttackKind::InterceptResend,
        AttackKind::DeltaSwap,
        AttackKind::DeltaSwapHPre,
        AttackKind::DeltaSwapRandomH,
        AttackKind::DelayedMeasurement,
        AttackKind::SourceControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackKind::None => "none",
            AttackKind::InterceptResend => "intercept",
            AttackKind::DeltaSwap => "delta",
            AttackKind::DeltaSwapHPre => "delta-hpre",
            AttackKind::DeltaSwapRandomH => "delta-random-h",
            AttackKind::DelayedMeasurement => "delayed",
            AttackKind::SourceControl => "source",
        }
    }

    pub fn check_compatible(self, variant: Variant, distribution: Distribution) -> Result<()> {
        let ok = match self {
            AttackKind::None | AttackKind::SourceControl => true,
            AttackKind::InterceptResend => distribution == Distribution::AlicePreparesBoth,
            AttackKind::DeltaSwap | AttackKind::DeltaSwapHPre | AttackKind::DeltaSwapRandomH => {
                distribution == Distribution::Exchange
            }
            // Eve's deferred step is triggered by the H announcement.
            AttackKind::DelayedMeasurement => distribution == Distribution::Exchange && variant == Variant::Modified,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Incompatible {
                attack: self,
                variant,
                distribution,
            })
        }
    }

    /// Fresh hooks for one round.
    pub fn hooks(self) -> Result<Box<dyn ChannelHooks>> {
        Ok(match self {
            AttackKind::None => Box::new(NoAdversary),
            AttackKind::InterceptResend => Box::new(intercept_resend_hooks()),
            AttackKind::DeltaSwap | AttackKind::DeltaSwapHPre | AttackKind::DeltaSwapRandomH => {
                Box::new(delta_swap_hooks(self)?)
            }
            AttackKind::DelayedMeasurement => Box::new(delayed_hooks()?),
            AttackKind::SourceControl => Box::new(source_control_hooks()),
        })
    }

    /// Whether Eve ends the round with a guess at the key.
    pub fn reads_key(self) -> bool {
        self != AttackKind::None
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EveRecord {
    pub first_bsm: Option<BellOutcome>,
    pub second_bsm: Option<BellOutcome>,
    /// Eve's copy of Bob's outcome.
    pub tu_outcome: BellOutcome,
    pub inferred_bits: KeyBits,
}

/// Eve's key guess, computed exactly as Bob computes his: her copy of
/// Bob's outcome stands in for his result.
pub fn eve_infer_key(tu_outcome: BellOutcome, alice_announced: BellOutcome) -> KeyBits {
    let p = deduce_pauli(alice_announced, imaginary_result(tu_outcome));
    key_bits(p, tu_outcome)
}

pub type Corrections = Vec<(QubitId, PauliOp)>;

/// Corrections after Eve's Bell measurement on `(2, P)`.
pub fn first_bsm_corrections(outcome: BellOutcome) -> Corrections {
    use PauliOp::{X, Z};
    match outcome {
        BellOutcome::PhiPlus => vec![],
        BellOutcome::PsiPlus => vec![(S, X), (T, X)],
        BellOutcome::PhiMinus => vec![(S, Z), (U, Z)],
        BellOutcome::PsiMinus => vec![(S, X), (T, X), (S, Z), (U, Z)],
    }
}

/// Corrections after Eve's Bell measurement on `(3, S)`, from the search in
/// [`derive_second_bsm_corrections`] against the plain resource state.
///
/// # Panics
///
/// If the search finds no correction for some outcome. That would mean the
/// attack cannot restore the resource state, so there is nothing sensible
/// to fall back to.
pub fn second_bsm_corrections(outcome: BellOutcome) -> Corrections {
    plain_tables().second[outcome.index()].clone()
}

/// Correction tables for one resource state.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTables {
    /// Eve's initial six-qubit state over `P Q R S T U`.
    pub resource: PureState,
    pub first: [Corrections; 4],
    pub second: [Corrections; 4],
}

fn plain_tables() -> &'static CorrectionTables {
    static TABLES: OnceLock<CorrectionTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let resource = prepare_delta(PQRSTU).expect("distinct labels");
        let second = derive_second_bsm_corrections(&resource)
            .unwrap_or_else(|e| panic!("second-measurement correction search failed: {e}"));
        CorrectionTables {
            resource,
            first: BellOutcome::ALL.map(first_bsm_corrections),
            second,
        }
    })
}

/// `H(P) H(Q) |δ>`.
pub fn hadamard_resource() -> crate::qkernel::Result<PureState> {
    prepare_delta(PQRSTU)?.apply_hadamard(P)?.apply_hadamard(Q)
}

fn compensated_tables(h_p: bool, h_q: bool) -> &'static CorrectionTables {
    static TABLES: [OnceLock<CorrectionTables>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let slot = match (h_p, h_q) {
        (false, false) => return plain_tables(),
        (true, false) => 0,
        (false, true) => 1,
        (true, true) => 2,
    };
    TABLES[slot].get_or_init(|| {
        let mut resource = prepare_delta(PQRSTU).expect("distinct labels");
        for (apply, q) in [(h_p, P), (h_q, Q)] {
            if apply {
                resource = resource.apply_hadamard(q).expect("label present");
            }
        }
        CorrectionTables::derive(resource)
            .unwrap_or_else(|e| panic!("correction search for H-compensated resource failed: {e}"))
    })
}

impl CorrectionTables {
    pub fn derive(resource: PureState) -> Result<Self> {
        let first = derive_first_bsm_corrections(&resource)?;
        let second = derive_second_bsm_corrections(&resource)?;
        Ok(CorrectionTables {
            resource,
            first,
            second,
        })
    }

    /// Tables used by the swap attack, with or without Eve's pre-applied
    /// Hadamards.
    pub fn shared(hadamard_compensated: bool) -> &'static CorrectionTables {
        compensated_tables(hadamard_compensated, hadamard_compensated)
    }

    /// Tables for the resource with `H` pre-applied on `P` and/or `Q`.
    pub fn with_hadamards(h_p: bool, h_q: bool) -> &'static CorrectionTables {
        compensated_tables(h_p, h_q)
    }
}

/// Pauli assignments on three qubits ordered by the number of non-identity
/// factors, so the search returns the sparsest correction.
fn candidates(targets: [QubitId; 3]) -> Vec<Corrections> {
    let mut all: Vec<Corrections> = Vec::with_capacity(64);
    for a in PauliOp::ALL {
        for b in PauliOp::ALL {
            for c in PauliOp::ALL {
                all.push(
                    targets
                        .iter()
                        .zip([a, b, c])
                        .filter(|(_, p)| *p != PauliOp::I)
                        .map(|(&q, p)| (q, p))
                        .collect(),
                );
            }
        }
    }
    all.sort_by_key(|c| c.len());
    all
}

/// State after Eve's measurement on `(2, P)` with outcome `b`, for Alice's
/// operation `sigma`. Qubits 2 and `P` are removed.
pub fn after_first_bsm(resource: &PureState, sigma: PauliOp, b: BellOutcome) -> Result<PureState> {
    let joint = bell_pair(Q1, Q2, BellOutcome::PhiPlus)?
        .apply_pauli(Q1, sigma)?
        .tensor(resource)?;
    let (_, post) = joint.project_bell((Q2, P), b)?;
    Ok(post.detach_bell_pair((Q2, P), b)?)
}

/// State after Eve's measurement on `(3, S)` with outcome `b`, starting from
/// the corrected first-stage state `σ_A(1) |resource>_1QRSTU`.
pub fn after_second_bsm(resource: &PureState, sigma: PauliOp, b: BellOutcome) -> Result<PureState> {
    let joint = first_stage_target(resource, sigma)?.tensor(&bell_pair(Q3, Q4, BellOutcome::PhiPlus)?)?;
    let (_, post) = joint.project_bell((Q3, S), b)?;
    Ok(post.detach_bell_pair((Q3, S), b)?)
}

/// `σ_A(1) |resource>_1QRSTU`.
pub fn first_stage_target(resource: &PureState, sigma: PauliOp) -> Result<PureState> {
    Ok(resource.relabeled(&[(P, Q1)])?.apply_pauli(Q1, sigma)?)
}

/// `σ_A(1) |resource>_1QR4TU`.
pub fn second_stage_target(resource: &PureState, sigma: PauliOp) -> Result<PureState> {
    Ok(resource.relabeled(&[(P, Q1), (S, Q4)])?.apply_pauli(Q1, sigma)?)
}

fn search(
    stage: &'static str,
    targets: [QubitId; 3],
    mut branch: impl FnMut(PauliOp, BellOutcome) -> Result<PureState>,
    mut goal: impl FnMut(PauliOp) -> Result<PureState>,
) -> Result<[Corrections; 4]> {
    let cands = candidates(targets);
    let mut table: [Corrections; 4] = Default::default();
    for b in BellOutcome::ALL {
        let branches: Vec<(PureState, PureState)> = PauliOp::ALL
            .iter()
            .map(|&sigma| Ok((branch(sigma, b)?, goal(sigma)?)))
            .collect::<Result<_>>()?;
        let mut found = None;
        for cand in &cands {
            let mut all = true;
            for (st, target) in &branches {
                if !st.apply_paulis(cand)?.equal_up_to_global_phase(target, EXACT_TOL)? {
                    all = false;
                    break;
                }
            }
            if all {
                found = Some(cand.clone());
                break;
            }
        }
        table[b.index()] = found.ok_or(Error::CorrectionSearch { stage, outcome: b })?;
    }
    Ok(table)
}

/// Searches Pauli corrections on `S, T, U` that bring the state after the
/// `(2, P)` measurement back to `σ_A(1) |resource>_1QRSTU` for every `σ_A`.
pub fn derive_first_bsm_corrections(resource: &PureState) -> Result<[Corrections; 4]> {
    search(
        "first",
        [S, T, U],
        |sigma, b| after_first_bsm(resource, sigma, b),
        |sigma| first_stage_target(resource, sigma),
    )
}

/// Searches Pauli corrections on `R, T, U` that bring the state after the
/// `(3, S)` measurement to `σ_A(1) |resource>_1QR4TU` for every `σ_A`.
pub fn derive_second_bsm_corrections(resource: &PureState) -> Result<[Corrections; 4]> {
    search(
        "second",
        [R, T, U],
        |sigma, b| after_second_bsm(resource, sigma, b),
        |sigma| second_stage_target(resource, sigma),
    )
}

/// Applies the corrections whose qubits are still in Eve's hands.
fn apply_available(state: &PureState, corrections: &[(QubitId, PauliOp)]) -> Result<PureState> {
    let present: Corrections = corrections
        .iter()
        .copied()
        .filter(|&(q, _)| state.contains(q))
        .collect();
    Ok(state.apply_paulis(&present)?)
}

fn read_tu(link: &mut Link<'_>) -> Result<BellOutcome> {
    let (tu, post) = link.state.measure_bell_and_detach((T, U), &mut *link.outcomes)?;
    *link.state = post;
    Ok(tu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HadamardMode {
    Never,
    Always,
    Coin,
}

/// Swap attack with immediate measurements.
#[derive(Debug, Clone)]
pub struct DeltaSwapHooks {
    mode: HadamardMode,
    tables: Option<&'static CorrectionTables>,
    hadamards: (bool, bool),
    first: Option<BellOutcome>,
    second: Option<BellOutcome>,
    record: Option<EveRecord>,
}

impl DeltaSwapHooks {
    /// Whether Eve pre-applied `H` on `P` and on `Q` this round.
    pub fn hadamards(&self) -> Option<(bool, bool)> {
        self.tables.map(|_| self.hadamards)
    }
}

pub fn delta_swap_hooks(kind: AttackKind) -> Result<DeltaSwapHooks> {
    let mode = match kind {
        AttackKind::DeltaSwap => HadamardMode::Never,
        AttackKind::DeltaSwapHPre => HadamardMode::Always,
        AttackKind::DeltaSwapRandomH => HadamardMode::Coin,
        other => return Err(Error::InvalidParameter(format!("{other} is not a swap attack"))),
    };
    Ok(DeltaSwapHooks {
        mode,
        tables: None,
        hadamards: (false, false),
        first: None,
        second: None,
        record: None,
    })
}

impl ChannelHooks for DeltaSwapHooks {
    fn on_qubit_from_alice(&mut self, link: &mut Link<'_>, qubit: QubitId) -> Result<QubitId> {
        if qubit != Q2 {
            return Ok(qubit);
        }
        let with_h = match self.mode {
            HadamardMode::Never => false,
            HadamardMode::Always => true,
            // One coin for both: independent coins give a per-round
            // detection of 5/8.
            HadamardMode::Coin => choose_uniform(&mut *link.outcomes, &[false, true]),
        };
        self.hadamards = (with_h, with_h);
        let tables = CorrectionTables::with_hadamards(self.hadamards.0, self.hadamards.1);
        self.tables = Some(tables);
        let joint = link.state.tensor(&tables.resource)?;
        let (b, post) = joint.measure_bell_and_detach((Q2, P), &mut *link.outcomes)?;
        *link.state = post.apply_paulis(&tables.first[b.index()])?;
        self.first = Some(b);
        Ok(Q)
    }

    fn on_qubit_from_bob(&mut self, link: &mut Link<'_>, qubit: QubitId) -> Result<QubitId> {
        let tables = match self.tables {
            Some(t) if qubit == Q3 => t,
            _ => return Ok(qubit),
        };
        let (b, post) = link.state.measure_bell_and_detach((Q3, S), &mut *link.outcomes)?;
        *link.state = post.apply_paulis(&tables.second[b.index()])?;
        self.second = Some(b);
        Ok(R)
    }

    fn on_result_announcement(&mut self, link: &mut Link<'_>, alice_result: BellOutcome) -> Result<()> {
        let tu = read_tu(link)?;
        self.record = Some(EveRecord {
            first_bsm: self.first,
            second_bsm: self.second,
            tu_outcome: tu,
            inferred_bits: eve_infer_key(tu, alice_result),
        });
        Ok(())
    }

    fn eve_record(&self) -> Option<EveRecord> {
        self.record
    }
}

/// Swap attack that holds qubits 2 and 3 until Alice says whether she
/// applied `H`.
#[derive(Debug, Clone, Default)]
pub struct DelayedHooks {
    first: Option<BellOutcome>,
    second: Option<BellOutcome>,
    record: Option<EveRecord>,
}

pub fn delayed_hooks() -> Result<DelayedHooks> {
    Ok(DelayedHooks::default())
}

impl ChannelHooks for DelayedHooks {
    fn on_qubit_from_alice(&mut self, link: &mut Link<'_>, qubit: QubitId) -> Result<QubitId> {
        if qubit != Q2 {
            return Ok(qubit);
        }
        *link.state = link.state.tensor(&plain_tables().resource)?;
        Ok(Q)
    }

    fn on_qubit_from_bob(&mut self, _link: &mut Link<'_>, qubit: QubitId) -> Result<QubitId> {
        // R goes straight to Alice; qubit 3 stays with Eve.
        Ok(if qubit == Q3 { R } else { qubit })
    }

    fn on_h_announcement(&mut self, link: &mut Link<'_>, applied: bool) -> Result<()> {
        if applied {
            *link.state = link.state.apply_hadamard(Q2)?.apply_hadamard(Q)?;
        }
        let (b, post) = link.state.measure_bell_and_detach((Q3, S), &mut *link.outcomes)?;
        *link.state = apply_available(&post, &plain_tables().second[b.index()])?;
        self.second = Some(b);
        Ok(())
    }

    fn on_result_announcement(&mut self, link: &mut Link<'_>, alice_result: BellOutcome) -> Result<()> {
        let (b, post) = link.state.measure_bell_and_detach((Q2, P), &mut *link.outcomes)?;
        *link.state = post;
        self.first = Some(b);
        let tu = read_tu(link)?;
        self.record = Some(EveRecord {
            first_bsm: self.first,
            second_bsm: self.second,
            tu_outcome: tu,
            inferred_bits: eve_infer_key(tu, alice_result),
        });
        Ok(())
    }

    fn eve_record(&self) -> Option<EveRecord> {
        self.record
    }
}

/// Bell measurement on qubits 2 and 4 while Alice sends both to Bob.
#[derive(Debug, Clone, Default)]
pub struct InterceptResendHooks {
    outcome: Option<BellOutcome>,
    record: Option<EveRecord>,
}

pub fn intercept_resend_hooks() -> InterceptResendHooks {
    InterceptResendHooks::default()
}

impl ChannelHooks for InterceptResendHooks {
    fn on_qubit_from_alice(&mut self, link: &mut Link<'_>, qubit: QubitId) -> Result<QubitId> {
        if qubit == Q4 && link.state.contains(Q2) {
            let (b, post) = link.state.measure_bell((Q2, Q4), &mut *link.outcomes)?;
            *link.state = post;
            self.outcome = Some(b);
        }
        Ok(qubit)
    }

    fn on_result_announcement(&mut self, _link: &mut Link<'_>, alice_result: BellOutcome) -> Result<()> {
        if let Some(b) = self.outcome {
            self.record = Some(EveRecord {
                first_bsm: Some(b),
                second_bsm: None,
                tu_outcome: b,
                inferred_bits: eve_infer_key(b, alice_result),
            });
        }
        Ok(())
    }

    fn eve_record(&self) -> Option<EveRecord> {
        self.record
    }
}

/// Eve controls the pair source and hands out `|δ>` directly: `P, R` play
/// Alice's qubits 1 and 3, `Q, S` Bob's qubits 2 and 4.
#[derive(Debug, Clone, Default)]
pub struct SourceControlHooks {
    record: Option<EveRecord>,
}

pub fn source_control_hooks() -> SourceControlHooks {
    SourceControlHooks::default()
}

impl ChannelHooks for SourceControlHooks {
    fn prepare(&mut self, _distribution: Distribution) -> Result<Option<PureState>> {
        Ok(Some(prepare_delta([Q1, Q2, Q3, Q4, T, U])?))
    }

    fn on_result_announcement(&mut self, link: &mut Link<'_>, alice_result: BellOutcome) -> Result<()> {
        let tu = read_tu(link)?;
        self.record = Some(EveRecord {
            first_bsm: None,
            second_bsm: None,
            tu_outcome: tu,
            inferred_bits: eve_infer_key(tu, alice_result),
        });
        Ok(())
    }

    fn eve_record(&self) -> Option<EveRecord> {
        self.record
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BellOutcome::*;
    use PauliOp::{X, Y, Z};

    #[test]
    fn first_table_entries() {
        assert_eq!(first_bsm_corrections(PhiPlus), vec![]);
        assert_eq!(first_bsm_corrections(PhiMinus), vec![(S, Z), (U, Z)]);
        assert_eq!(first_bsm_corrections(PsiMinus), vec![(S, X), (T, X), (S, Z), (U, Z)]);
    }

    #[test]
    fn first_table_restores_resource() {
        let tables = CorrectionTables::shared(false);
        for sigma in PauliOp::ALL {
            for b in BellOutcome::ALL {
                let st = after_first_bsm(&tables.resource, sigma, b)
                    .unwrap()
                    .apply_paulis(&first_bsm_corrections(b))
                    .unwrap();
                let target = first_stage_target(&tables.resource, sigma).unwrap();
                assert!(st.equal_up_to_global_phase(&target, EXACT_TOL).unwrap(), "{sigma} {b}");
            }
        }
    }

    #[test]
    fn first_table_agrees_with_search() {
        let derived = derive_first_bsm_corrections(&CorrectionTables::shared(false).resource).unwrap();
        assert_eq!(derived[PhiPlus.index()], vec![]);
        assert_eq!(derived[PsiPlus.index()], vec![(S, X), (T, X)]);
        assert_eq!(derived[PhiMinus.index()], vec![(S, Z), (U, Z)]);
        // Z·X on S is Y up to phase
        assert_eq!(derived[PsiMinus.index()], vec![(S, Y), (T, X), (U, Z)]);
    }

    #[test]
    fn second_table_matches_docs() {
        assert_eq!(second_bsm_corrections(PhiPlus), vec![]);
        assert_eq!(second_bsm_corrections(PhiMinus), vec![(R, Z), (T, Z)]);
        assert_eq!(second_bsm_corrections(PsiPlus), vec![(R, X), (U, X)]);
        assert_eq!(second_bsm_corrections(PsiMinus), vec![(R, Y), (T, Z), (U, X)]);
    }

    #[test]
    fn second_table_restores_resource() {
        let tables = CorrectionTables::shared(false);
        for sigma in PauliOp::ALL {
            for b in BellOutcome::ALL {
                let st = after_second_bsm(&tables.resource, sigma, b)
                    .unwrap()
                    .apply_paulis(&second_bsm_corrections(b))
                    .unwrap();
                let target = second_stage_target(&tables.resource, sigma).unwrap();
                assert!(st.equal_up_to_global_phase(&target, EXACT_TOL).unwrap());
            }
        }
    }

    #[test]
    fn hadamard_resource_has_tables() {
        let t = CorrectionTables::shared(true);
        assert_eq!(t.first[PhiPlus.index()], vec![]);
        // The pre-applied H on P exchanges the roles of X and Z.
        assert_eq!(t.first[PsiPlus.index()], vec![(S, Z), (U, Z)]);
        assert_eq!(t.first[PhiMinus.index()], vec![(S, X), (T, X)]);
        assert_eq!(t.second, CorrectionTables::shared(false).second);
    }

    #[test]
    fn single_hadamard_resources_have_tables() {
        for (hp, hq) in [(true, false), (false, true)] {
            let t = CorrectionTables::with_hadamards(hp, hq);
            assert_eq!(t.second, CorrectionTables::shared(false).second);
        }
    }

    #[test]
    fn eve_key_mirrors_bob() {
        assert_eq!(eve_infer_key(PhiMinus, PsiMinus).to_string(), "0101");
        for b in BellOutcome::ALL {
            let k = eve_infer_key(b, b);
            assert_eq!(k, KeyBits::new(PauliOp::I, b));
        }
    }

    #[test]
    fn compatibility_rules() {
        use Distribution::*;
        use Variant::*;
        assert!(AttackKind::InterceptResend
            .check_compatible(Original, Exchange)
            .is_err());
        assert!(AttackKind::InterceptResend
            .check_compatible(Original, AlicePreparesBoth)
            .is_ok());
        assert!(AttackKind::DeltaSwap
            .check_compatible(Original, AlicePreparesBoth)
            .is_err());
        assert!(AttackKind::DelayedMeasurement
            .check_compatible(Original, Exchange)
            .is_err());
        assert!(AttackKind::DelayedMeasurement
            .check_compatible(Modified, Exchange)
            .is_ok());
        for d in [Exchange, AlicePreparesBoth] {
            assert!(AttackKind::SourceControl.check_compatible(Modified, d).is_ok());
            assert!(AttackKind::None.check_compatible(Original, d).is_ok());
        }
    }

    #[test]
    fn swap_hooks_reject_other_kinds() {
        assert!(delta_swap_hooks(AttackKind::DelayedMeasurement).is_err());
    }
}
