//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the PASS/FAIL lines are always printed; exits non-zero if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;

use esqkd::adversary::{derive_second_bsm_corrections, AttackKind, CorrectionTables};
use esqkd::analysis::{
    enumerate_round, exact_round_stats, monte_carlo_counts, session_from_round, Estimate, Probability, Scenario,
};
use esqkd::protocol::{Distribution, RoundTranscript, Variant};
use esqkd::qkernel::labels::{P, PQRSTU, Q, Q1, Q2, Q3, Q4, R, S, T, U};
use esqkd::qkernel::{
    bell_pair, bell_product, pauli_bell_action, prepare_delta, prepare_delta_circuit, prepare_delta_circuit_stages,
    superpose, BellOutcome, PauliOp, PureState,
};

use BellOutcome::*;

const TOL: f64 = 1e-12;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q(n: i64, d: i64) -> Probability {
    Probability::ratio(n, d)
}

fn two_pairs() -> PureState {
    bell_pair(Q1, Q2, PhiPlus)
        .unwrap()
        .tensor(&bell_pair(Q3, Q4, PhiPlus).unwrap())
        .unwrap()
}

fn triple(pr: BellOutcome, qs: BellOutcome, tu: BellOutcome) -> PureState {
    bell_product(&[((P, R), pr), ((Q, S), qs), ((T, U), tu)], &PQRSTU).unwrap()
}

fn swapping_identity() -> Outcome {
    let start = Instant::now();
    let st = two_pairs();
    let dist = st.bell_distribution((Q1, Q3)).unwrap();
    for (b, p) in BellOutcome::ALL.iter().zip(dist) {
        ensure((p - 0.25).abs() <= TOL, format!("P({b}) = {p}"))?;
        let (_, post) = st.project_bell((Q1, Q3), *b).unwrap();
        let bob = post.detach_bell_pair((Q1, Q3), *b).unwrap();
        let f = bob.fidelity(&bell_pair(Q2, Q4, *b).unwrap()).unwrap();
        ensure((f - 1.0).abs() <= TOL, format!("(2,4) fidelity {f} after {b}"))?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!("uniform outcomes, matched collapse, {took:.1?}"))
}

fn twisted_swapping() -> Outcome {
    let mut worst: f64 = 0.0;
    for sigma in PauliOp::ALL {
        for b in BellOutcome::ALL {
            let st = two_pairs().apply_pauli(Q1, sigma).unwrap();
            let (_, post) = st.project_bell((Q1, Q3), b).unwrap();
            let bob = post.detach_bell_pair((Q1, Q3), b).unwrap();
            let f = bob
                .fidelity(&bell_pair(Q2, Q4, pauli_bell_action(sigma, b)).unwrap())
                .unwrap();
            worst = worst.max((f - 1.0).abs());
        }
    }
    ensure(worst <= TOL, format!("fidelity off by {worst:e}"))?;
    Ok(format!("16 cases, max |F - 1| = {worst:.1e}"))
}

fn delta_structure() -> Outcome {
    let d = prepare_delta(PQRSTU).unwrap();
    for a in BellOutcome::ALL {
        for b in BellOutcome::ALL {
            for c in BellOutcome::ALL {
                let want = if a == b && b == c { 0.5 } else { 0.0 };
                let amp = triple(a, b, c).inner(&d).unwrap();
                ensure(
                    (amp - Complex64::new(want, 0.0)).norm() <= TOL,
                    format!("<{a}{b}{c}|delta> = {amp}"),
                )?;
            }
        }
    }
    for b in BellOutcome::ALL {
        let (p, st) = d.project_bell((P, R), b).unwrap();
        ensure((p - 0.25).abs() <= TOL, format!("P_PR({b}) = {p}"))?;
        let qs = st.bell_distribution((Q, S)).unwrap();
        ensure((qs[b.index()] - 1.0).abs() <= TOL, format!("(Q,S) after {b}: {qs:?}"))?;
        let (_, st) = st.project_bell((Q, S), b).unwrap();
        let tu = st.bell_distribution((T, U)).unwrap();
        ensure((tu[b.index()] - 1.0).abs() <= TOL, format!("(T,U) after {b}: {tu:?}"))?;
    }
    Ok("four matched triples at 1/2, sequential outcomes agree".into())
}

fn preparation_circuit() -> Outcome {
    let r = |x: f64| Complex64::new(x, 0.0);
    let stages = prepare_delta_circuit_stages(PQRSTU, PhiMinus, r(1.0)).unwrap();
    let same = |a: &PureState, b: &PureState| a.equal_up_to_global_phase(b, TOL).unwrap();
    ensure(
        same(&stages.initial, &triple(PhiMinus, PhiPlus, PhiPlus)),
        "initial state",
    )?;
    let after_h = superpose(&[
        (r(1.0), triple(PhiPlus, PhiMinus, PhiPlus)),
        (r(1.0), triple(PhiPlus, PsiPlus, PhiPlus)),
        (r(-1.0), triple(PsiMinus, PhiMinus, PhiPlus)),
        (r(-1.0), triple(PsiMinus, PsiPlus, PhiPlus)),
    ])
    .unwrap();
    ensure(same(&stages.after_hadamards, &after_h), "state after the Hadamards")?;
    let after_pr = superpose(&[
        (r(1.0), triple(PhiPlus, PhiPlus, PhiPlus)),
        (r(1.0), triple(PhiPlus, PsiMinus, PhiPlus)),
        (r(1.0), triple(PsiMinus, PhiMinus, PhiPlus)),
        (r(1.0), triple(PsiMinus, PsiPlus, PhiPlus)),
    ])
    .unwrap();
    ensure(
        same(&stages.after_pr_control, &after_pr),
        "state after the (P,R) control",
    )?;
    let out = prepare_delta_circuit(PQRSTU).unwrap();
    let d = prepare_delta(PQRSTU).unwrap();
    let f = out.fidelity(&d).unwrap();
    ensure(
        out.equal_up_to_global_phase(&d, TOL).unwrap(),
        format!("intermediate states match, but the output has fidelity {f:.6} with |delta> (Phi- Phi- Phi- carries a relative -1)"),
    )?;
    Ok("output equals |delta>".into())
}

fn all_branches(s: &Scenario) -> Vec<RoundTranscript> {
    enumerate_round(s, &s.round_config())
        .unwrap()
        .branches
        .into_iter()
        .map(|b| b.transcript)
        .collect()
}

fn attack_on_original() -> Outcome {
    let s = Scenario::new(Variant::Original, AttackKind::DeltaSwap);
    let st = exact_round_stats(&s).unwrap();
    ensure(
        st.detection == Probability::zero(),
        format!("P(detected) = {}", st.detection),
    )?;
    ensure(
        st.eve_agreement == Some(Probability::one()),
        "P(Eve bits = key bits) != 1",
    )?;
    let c = monte_carlo_counts(&s, 1, 1, 10_000, 20_240_531).unwrap();
    ensure(
        c.detected_rounds == 0,
        format!("{} sampled detections", c.detected_rounds),
    )?;
    ensure(
        c.eve_agreements == c.rounds,
        format!("{} of {} sampled agreements", c.eve_agreements, c.rounds),
    )?;
    Ok(format!("{} branches; 10^4 sampled sessions, 0 deviations", st.branches))
}

fn modified_vs_swap() -> Outcome {
    let start = Instant::now();
    let s = Scenario::new(Variant::Modified, AttackKind::DeltaSwap);
    let st = exact_round_stats(&s).unwrap();
    ensure(st.detection_with_h == Some(q(1, 2)), "P(detected | H) != 1/2")?;
    ensure(
        st.detection_without_h == Some(Probability::zero()),
        "P(detected | no H) != 0",
    )?;
    ensure(st.detection == q(1, 4), format!("per-round detection {}", st.detection))?;
    for n in 1..=32u32 {
        let p = session_from_round(&st.detection, n).value();
        let closed = 1.0 - 0.75f64.powi(n as i32);
        ensure((p - closed).abs() <= TOL, format!("n = {n}: {p} vs {closed}"))?;
    }
    let c = monte_carlo_counts(&s, 1, 1, 100_000, 7).unwrap();
    let e = Estimate::new(c.detected_rounds, c.rounds, &st.detection);
    ensure(e.consistent, format!("sampled {} ± {}", e.rate, e.standard_error))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), format!("took {took:?}"))?;
    Ok(format!(
        "1/2 with H, 0 without, curve exact to n = 32, sampled {:.5} ± {:.5}, {took:.1?}",
        e.rate, e.standard_error
    ))
}

fn precompensation() -> Outcome {
    let st = exact_round_stats(&Scenario::new(Variant::Modified, AttackKind::DeltaSwapHPre)).unwrap();
    ensure(
        st.detection_with_h == Some(Probability::zero()),
        "error when Alice applies H",
    )?;
    ensure(
        st.eve_agreement_with_h == Some(Probability::one()),
        "leakage not complete when Alice applies H",
    )?;
    ensure(st.detection == q(1, 4), format!("per-round detection {}", st.detection))?;
    let rnd = exact_round_stats(&Scenario::new(Variant::Modified, AttackKind::DeltaSwapRandomH)).unwrap();
    ensure(
        rnd.detection_with_h == rnd.detection_without_h,
        format!(
            "random H: {:?} with H, {:?} without",
            rnd.detection_with_h.as_ref().map(|p| p.to_string()),
            rnd.detection_without_h.as_ref().map(|p| p.to_string())
        ),
    )?;
    ensure(
        rnd.detection_with_h.as_ref().is_some_and(|p| *p > Probability::zero()),
        "random H: no errors",
    )?;
    Ok(format!(
        "full leakage under H; random H gives {} on both flags",
        rnd.detection_with_h.unwrap()
    ))
}

fn delayed_measurement() -> Outcome {
    let s = Scenario::new(Variant::Modified, AttackKind::DelayedMeasurement);
    let e = enumerate_round(&s, &s.round_config()).unwrap();
    for a in BellOutcome::ALL {
        for b in BellOutcome::ALL {
            let joint = e.probability(|t| t.alice_result == a && t.bob_result == b);
            ensure(joint == q(1, 16), format!("P(Alice {a}, Bob {b}) = {joint}"))?;
        }
    }
    let d = exact_round_stats(&s).unwrap().detection;
    for n in 1..=32u32 {
        let p = session_from_round(&d, n).value();
        let closed = 1.0 - 0.25f64.powi(n as i32);
        ensure((p - closed).abs() <= TOL, format!("n = {n}: {p} vs {closed}"))?;
    }
    Ok("Bob uniform and independent of Alice; curve exact to n = 32".into())
}

fn honest_soundness() -> Outcome {
    let mut branches = 0;
    for v in [Variant::Original, Variant::Modified] {
        for d in [Distribution::Exchange, Distribution::AlicePreparesBoth] {
            let s = Scenario::new(v, AttackKind::None).with_distribution(d);
            for t in all_branches(&s) {
                branches += 1;
                ensure(
                    !t.detected && t.bob_deduced_pauli == t.alice_pauli,
                    format!("{s}: {t:?}"),
                )?;
            }
        }
    }
    Ok(format!("{branches} branches, no detection"))
}

fn second_bsm_table() -> Outcome {
    let table = derive_second_bsm_corrections(&CorrectionTables::shared(false).resource).map_err(|e| e.to_string())?;
    let text: Vec<String> = BellOutcome::ALL
        .iter()
        .zip(&table)
        .map(|(b, ops)| {
            let ops: Vec<String> = ops.iter().map(|(q, p)| format!("{p}{q}")).collect();
            format!("{}: [{}]", b.symbol(), ops.join(" "))
        })
        .collect();
    Ok(text.join(", "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("entanglement swapping identity", swapping_identity),
        ("Pauli-twisted swapping", twisted_swapping),
        ("resource state structure", delta_structure),
        ("preparation circuit", preparation_circuit),
        ("swap attack on the original protocol", attack_on_original),
        ("hardened protocol against the swap attack", modified_vs_swap),
        ("Hadamard pre-compensation and random H", precompensation),
        ("delayed measurement", delayed_measurement),
        ("honest-protocol soundness", honest_soundness),
        ("derived second-measurement corrections", second_bsm_table),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
