//! Exact identity checks behind `esqkd verify`.

use num_complex::Complex64;

use crate::adversary::{
    after_first_bsm, after_second_bsm, first_bsm_corrections, first_stage_target, second_bsm_corrections,
    second_stage_target, AttackKind, CorrectionTables,
};
use crate::analysis::{enumerate_round, exact_round_stats, session_from_round, Probability, Scenario};
use crate::protocol::Variant;
use crate::qkernel::labels::{P, PQRSTU, Q, Q1, Q2, Q3, Q4, R, S, T, U};
use crate::qkernel::{
    bell_pair, bell_product, chi, omega, pauli_bell_action, prepare_delta, prepare_delta_circuit_stages, superpose,
    BellOutcome, PauliOp, PureState, Sign, EXACT_TOL,
};
use crate::Result;

use BellOutcome::*;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub anchor: &'static str,
    pub claim: &'static str,
    pub passed: bool,
    /// Extra context printed on failure.
    pub detail: Option<String>,
}

/// Canary switches for exercising the failure path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Mutation {
    /// Start the preparation circuit from `Phi+` on `(P, R)` instead of `Phi-`.
    pub flip_bell_phase: bool,
}

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn same(a: &PureState, b: &PureState) -> Result<bool> {
    Ok(a.equal_up_to_global_phase(b, EXACT_TOL)?)
}

fn triple(pr: BellOutcome, qs: BellOutcome, tu: BellOutcome) -> Result<PureState> {
    Ok(bell_product(&[((P, R), pr), ((Q, S), qs), ((T, U), tu)], &PQRSTU)?)
}

fn two_pairs() -> Result<PureState> {
    Ok(bell_pair(Q1, Q2, PhiPlus)?.tensor(&bell_pair(Q3, Q4, PhiPlus)?)?)
}

fn swapping() -> Result<bool> {
    let st = two_pairs()?;
    let dist = st.bell_distribution((Q1, Q3))?;
    if dist.iter().any(|p| (p - 0.25).abs() > EXACT_TOL) {
        return Ok(false);
    }
    for b in BellOutcome::ALL {
        let (_, post) = st.project_bell((Q1, Q3), b)?;
        if !same(&post.detach_bell_pair((Q1, Q3), b)?, &bell_pair(Q2, Q4, b)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn twisted_swapping(hadamard: bool) -> Result<bool> {
    for sigma in PauliOp::ALL {
        for b in BellOutcome::ALL {
            let mut st = two_pairs()?;
            if hadamard {
                st = st.apply_hadamard(Q1)?;
            }
            let (_, post) = st.apply_pauli(Q1, sigma)?.project_bell((Q1, Q3), b)?;
            let mut bob = post.detach_bell_pair((Q1, Q3), b)?;
            if hadamard {
                bob = bob.apply_hadamard(Q2)?;
            }
            if bob.fidelity(&bell_pair(Q2, Q4, pauli_bell_action(sigma, b))?)? < 1.0 - EXACT_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn hadamard_pairs() -> Result<bool> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cases = [
        (omega(Q1, Q2, Sign::Plus)?, [(r(s), PhiMinus), (r(s), PsiPlus)]),
        (omega(Q1, Q2, Sign::Minus)?, [(r(s), PhiPlus), (r(-s), PsiMinus)]),
        (chi(Q1, Q2, Sign::Plus)?, [(r(s), PsiMinus), (r(s), PhiPlus)]),
        (chi(Q1, Q2, Sign::Minus)?, [(r(s), PsiPlus), (r(-s), PhiMinus)]),
    ];
    for (st, terms) in cases {
        for (coeff, b) in terms {
            if (bell_pair(Q1, Q2, b)?.inner(&st)? - coeff).norm() > EXACT_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn honest_enumeration() -> Result<bool> {
    for v in [Variant::Original, Variant::Modified] {
        let s = Scenario::new(v, AttackKind::None);
        let e = enumerate_round(&s, &s.round_config())?;
        if e.total() != Probability::one() || e.branches.iter().any(|b| b.transcript.detected) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn delta_triples() -> Result<bool> {
    let d = prepare_delta(PQRSTU)?;
    for a in BellOutcome::ALL {
        for b in BellOutcome::ALL {
            for c in BellOutcome::ALL {
                let want = if a == b && b == c { 0.5 } else { 0.0 };
                if (triple(a, b, c)?.inner(&d)? - r(want)).norm() > EXACT_TOL {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn delta_sequential() -> Result<bool> {
    let d = prepare_delta(PQRSTU)?;
    for b in BellOutcome::ALL {
        let (p, st) = d.project_bell((P, R), b)?;
        if (p - 0.25).abs() > EXACT_TOL {
            return Ok(false);
        }
        let certain = |st: &PureState, pair| -> Result<bool> {
            let dist = st.bell_distribution(pair)?;
            Ok((dist[b.index()] - 1.0).abs() <= EXACT_TOL)
        };
        if !certain(&st, (Q, S))? {
            return Ok(false);
        }
        let (_, st) = st.project_bell((Q, S), b)?;
        if !certain(&st, (T, U))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn initial_pr(m: Mutation) -> BellOutcome {
    if m.flip_bell_phase {
        PhiPlus
    } else {
        PhiMinus
    }
}

fn circuit_stages(m: Mutation) -> Result<bool> {
    let st = prepare_delta_circuit_stages(PQRSTU, initial_pr(m), r(1.0))?;
    let initial = triple(PhiMinus, PhiPlus, PhiPlus)?;
    let after_h = superpose(&[
        (r(1.0), triple(PhiPlus, PhiMinus, PhiPlus)?),
        (r(1.0), triple(PhiPlus, PsiPlus, PhiPlus)?),
        (r(-1.0), triple(PsiMinus, PhiMinus, PhiPlus)?),
        (r(-1.0), triple(PsiMinus, PsiPlus, PhiPlus)?),
    ])?;
    let after_pr = superpose(&[
        (r(1.0), triple(PhiPlus, PhiPlus, PhiPlus)?),
        (r(1.0), triple(PhiPlus, PsiMinus, PhiPlus)?),
        (r(1.0), triple(PsiMinus, PhiMinus, PhiPlus)?),
        (r(1.0), triple(PsiMinus, PsiPlus, PhiPlus)?),
    ])?;
    Ok(same(&st.initial, &initial)? && same(&st.after_hadamards, &after_h)? && same(&st.after_pr_control, &after_pr)?)
}

fn circuit_output(m: Mutation, qs_phase: f64) -> Result<(bool, f64)> {
    let out = prepare_delta_circuit_stages(PQRSTU, initial_pr(m), r(qs_phase))?.output;
    let d = prepare_delta(PQRSTU)?;
    Ok((same(&out, &d)?, out.fidelity(&d)?))
}

fn first_corrections() -> Result<bool> {
    let res = &CorrectionTables::shared(false).resource;
    for sigma in PauliOp::ALL {
        for b in BellOutcome::ALL {
            let st = after_first_bsm(res, sigma, b)?.apply_paulis(&first_bsm_corrections(b))?;
            if !same(&st, &first_stage_target(res, sigma)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn second_corrections() -> Result<bool> {
    let res = &CorrectionTables::shared(false).resource;
    for sigma in PauliOp::ALL {
        for b in BellOutcome::ALL {
            let st = after_second_bsm(res, sigma, b)?.apply_paulis(&second_bsm_corrections(b))?;
            if !same(&st, &second_stage_target(res, sigma)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn eve_copies_bob(variant: Variant, attack: AttackKind) -> Result<bool> {
    let s = Scenario::new(variant, attack);
    let e = enumerate_round(&s, &s.round_config())?;
    Ok(e.branches.iter().all(|b| {
        let t = &b.transcript;
        !t.detected && t.eve.is_some_and(|eve| eve.tu_outcome == t.bob_result) && t.eve_bits() == Some(t.key_bits)
    }))
}

fn q(n: i64, d: i64) -> Probability {
    Probability::ratio(n, d)
}

fn hardened_against_swap() -> Result<bool> {
    let st = exact_round_stats(&Scenario::new(Variant::Modified, AttackKind::DeltaSwap))?;
    Ok(st.detection == q(1, 4)
        && st.detection_with_h == Some(q(1, 2))
        && st.detection_without_h == Some(Probability::zero()))
}

fn hadamard_splits_bob() -> Result<bool> {
    let s = Scenario::new(Variant::Modified, AttackKind::DeltaSwap);
    let cfg = s.round_config().with_pauli(PauliOp::I).with_hadamard(true);
    let e = enumerate_round(&s, &cfg)?;
    let given = |t: &crate::protocol::RoundTranscript| t.alice_result == PhiMinus;
    let half = Some(q(1, 2));
    Ok(e.conditional(|t| t.bob_result == PhiMinus, given) == half
        && e.conditional(|t| t.bob_result == PsiPlus, given) == half)
}

fn precompensation() -> Result<bool> {
    let st = exact_round_stats(&Scenario::new(Variant::Modified, AttackKind::DeltaSwapHPre))?;
    Ok(st.detection == q(1, 4)
        && st.detection_with_h == Some(Probability::zero())
        && st.eve_agreement_with_h == Some(Probability::one())
        && st.detection_without_h == Some(q(1, 2)))
}

fn random_hadamard() -> Result<bool> {
    let st = exact_round_stats(&Scenario::new(Variant::Modified, AttackKind::DeltaSwapRandomH))?;
    Ok(st.detection == q(1, 4)
        && st.detection_with_h == st.detection_without_h
        && st.detection_with_h.is_some_and(|p| p > Probability::zero()))
}

fn delayed() -> Result<bool> {
    let s = Scenario::new(Variant::Modified, AttackKind::DelayedMeasurement);
    let e = enumerate_round(&s, &s.round_config())?;
    for a in BellOutcome::ALL {
        for b in BellOutcome::ALL {
            let p = e.conditional(|t| t.bob_result == b, |t| t.alice_result == a);
            if p != Some(q(1, 4)) {
                return Ok(false);
            }
        }
    }
    let tu_matches = e.branches.iter().all(|b| {
        b.transcript
            .eve
            .is_some_and(|eve| eve.tu_outcome == b.transcript.bob_result)
    });
    Ok(tu_matches && e.probability(|t| !t.detected) == q(1, 4))
}

fn source_matches_swap() -> Result<bool> {
    let a = exact_round_stats(&Scenario::new(Variant::Modified, AttackKind::SourceControl))?;
    let b = exact_round_stats(&Scenario::new(Variant::Modified, AttackKind::DeltaSwap))?;
    Ok(a.detection == b.detection
        && a.detection_with_h == b.detection_with_h
        && a.detection_without_h == b.detection_without_h
        && a.eve_agreement == b.eve_agreement)
}

fn session_curves() -> Result<bool> {
    for (attack, q) in [(AttackKind::DeltaSwap, 0.75f64), (AttackKind::DelayedMeasurement, 0.25)] {
        let d = exact_round_stats(&Scenario::new(Variant::Modified, attack))?.detection;
        for n in 1..=32u32 {
            let exact = session_from_round(&d, n).value();
            if (exact - (1.0 - q.powi(n as i32))).abs() > EXACT_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn run_suite(m: Mutation) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut add = |anchor, claim, passed: bool, detail: Option<String>| {
        out.push(Check {
            anchor,
            claim,
            passed,
            detail,
        })
    };
    add(
        "entanglement swapping",
        "Bell measurement on (1,3) of Phi+ Phi+ is uniform and leaves (2,4) in the same Bell state",
        swapping()?,
        None,
    );
    add(
        "Pauli-twisted swapping",
        "after sigma_A on qubit 1, Bob's pair is pauli_bell_action(sigma_A, Alice's outcome)",
        twisted_swapping(false)?,
        None,
    );
    add(
        "Hadamard Bell pairs",
        "H on the first qubit maps each Bell state to the stated two-term superposition",
        hadamard_pairs()?,
        None,
    );
    add(
        "Hadamard cancellation",
        "H on qubit 1 before Alice's measurement and on qubit 2 before Bob's restores the correlation",
        twisted_swapping(true)?,
        None,
    );
    add(
        "honest branch listing",
        "no round of either variant is flagged without an eavesdropper",
        honest_enumeration()?,
        None,
    );
    add(
        "resource state",
        "|delta> is 1/2 times the sum of the four matched Bell triples",
        delta_triples()?,
        None,
    );
    add(
        "resource state measurements",
        "Bell results on (P,R) and (Q,S) agree and fix (T,U)",
        delta_sequential()?,
        None,
    );
    add(
        "preparation circuit stages",
        "the initial, post-Hadamard and post-(P,R)-control states match",
        circuit_stages(m)?,
        None,
    );
    let (ok, fid) = circuit_output(m, 1.0)?;
    add(
        "preparation circuit output",
        "the circuit as drawn produces |delta> up to global phase",
        ok,
        Some(format!("fidelity with |delta> is {fid:.6}")),
    );
    let (ok, fid) = circuit_output(m, -1.0)?;
    add(
        "preparation circuit, corrected phase",
        "with -1 on the Phi- branch of the (Q,S) control the circuit produces |delta>",
        ok,
        Some(format!("fidelity with |delta> is {fid:.6}")),
    );
    add(
        "first swap corrections",
        "after the (2,P) measurement the listed corrections give sigma_A(1)|delta>_1QRSTU",
        first_corrections()?,
        None,
    );
    add(
        "second swap corrections",
        "after the (3,S) measurement the derived corrections give sigma_A(1)|delta>_1QR4TU",
        second_corrections()?,
        None,
    );
    add(
        "swap attack, original protocol",
        "Eve's (T,U) equals Bob's outcome, her key equals his and no round is flagged",
        eve_copies_bob(Variant::Original, AttackKind::DeltaSwap)?,
        None,
    );
    add(
        "source control, original protocol",
        "a delta-emitting source gives the same undetected full copy",
        eve_copies_bob(Variant::Original, AttackKind::SourceControl)?,
        None,
    );
    add(
        "intercept-resend",
        "with both pairs sent by Alice, Eve learns every key undetected",
        eve_copies_bob(Variant::Original, AttackKind::InterceptResend)?,
        None,
    );
    add(
        "swap attack, hardened protocol",
        "detection 1/2 when Alice applies H, 0 otherwise, 1/4 per round",
        hardened_against_swap()?,
        None,
    );
    add(
        "swap attack, hardened protocol",
        "with H and Alice's Phi-, Bob gets Phi- or Psi+ with probability 1/2 each",
        hadamard_splits_bob()?,
        None,
    );
    add(
        "Hadamard pre-compensation",
        "full leakage and no error when Alice applies H, detection 1/2 otherwise",
        precompensation()?,
        None,
    );
    add(
        "random pre-compensation",
        "equal detection rates for both H flags, 1/4 per round",
        random_hadamard()?,
        None,
    );
    add(
        "delayed measurement",
        "Bob's outcome is uniform given Alice's and Eve stays undetected with probability 1/4",
        delayed()?,
        None,
    );
    add(
        "source control, hardened protocol",
        "same statistics as the swap attack",
        source_matches_swap()?,
        None,
    );
    add(
        "session detection",
        "1-(3/4)^n for the swap attack and 1-(1/4)^n for delayed measurement, n <= 32",
        session_curves()?,
        None,
    );
    Ok(out)
}

/// The second-measurement correction table, one line per outcome.
pub fn second_table_lines() -> Vec<String> {
    BellOutcome::ALL
        .iter()
        .map(|&b| {
            let ops = second_bsm_corrections(b);
            let text = if ops.is_empty() {
                "none".to_string()
            } else {
                ops.iter()
                    .map(|(q, p)| format!("{p}({q})"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            format!("{:<5} -> {text}", b.symbol())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_the_literal_circuit_fails() {
        let checks = run_suite(Mutation::default()).unwrap();
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.anchor).collect();
        assert_eq!(failed, vec!["preparation circuit output"]);
    }

    #[test]
    fn canary_breaks_the_corrected_circuit() {
        let checks = run_suite(Mutation { flip_bell_phase: true }).unwrap();
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.anchor).collect();
        assert!(failed.contains(&"preparation circuit, corrected phase"));
    }

    #[test]
    fn table_lines() {
        let lines = second_table_lines();
        assert_eq!(lines[0], "Phi+  -> none");
        assert_eq!(lines.len(), 4);
    }
}
