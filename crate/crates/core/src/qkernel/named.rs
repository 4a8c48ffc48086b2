use num_complex::Complex64;

use super::conditioned::BranchAction;
use super::gates::{BellOutcome, PauliOp};
use super::qubit::QubitId;
use super::state::PureState;
use super::{KernelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Two-qubit Bell state on `(a, b)`.
pub fn bell_pair(a: QubitId, b: QubitId, which: BellOutcome) -> Result<PureState> {
    PureState::bell_pair(a, b, which)
}

/// `omega± = H(a) Phi± = (Phi∓ ± Psi±)/√2`.
pub fn omega(a: QubitId, b: QubitId, sign: Sign) -> Result<PureState> {
    let phi = match sign {
        Sign::Plus => BellOutcome::PhiPlus,
        Sign::Minus => BellOutcome::PhiMinus,
    };
    bell_pair(a, b, phi)?.apply_hadamard(a)
}

/// `chi± = H(a) Psi± = (Psi∓ ± Phi±)/√2`.
pub fn chi(a: QubitId, b: QubitId, sign: Sign) -> Result<PureState> {
    let psi = match sign {
        Sign::Plus => BellOutcome::PsiPlus,
        Sign::Minus => BellOutcome::PsiMinus,
    };
    bell_pair(a, b, psi)?.apply_hadamard(a)
}

/// The eight basis kets carrying amplitude `1/(2√2)` in Eve's six-qubit
/// resource state, in `P Q R S T U` order.
pub const DELTA_TERMS: [&str; 8] = [
    "000000", "001101", "010111", "011010", "100110", "101011", "110001", "111100",
];

fn six_distinct(labels: [QubitId; 6]) -> Result<()> {
    for i in 0..6 {
        for j in (i + 1)..6 {
            if labels[i] == labels[j] {
                return Err(KernelError::DuplicateLabel(labels[i]));
            }
        }
    }
    Ok(())
}

/// Eve's resource state over `(P, Q, R, S, T, U)`: an equal superposition of
/// the eight [`DELTA_TERMS`].
///
/// It regroups as `½ Σ_B |B>_PR |B>_QS |B>_TU`, so Bell measurements on
/// `(P,R)` and `(Q,S)` always agree and leave `(T,U)` in the same state.
pub fn prepare_delta(labels: [QubitId; 6]) -> Result<PureState> {
    six_distinct(labels)?;
    let amp = Complex64::new(1.0 / (2.0 * std::f64::consts::SQRT_2), 0.0);
    let terms: Vec<(&str, Complex64)> = DELTA_TERMS.iter().map(|&k| (k, amp)).collect();
    PureState::from_kets(&labels, &terms)
}

/// Intermediate states of the three-Bell-pair preparation circuit.
#[derive(Debug, Clone)]
pub struct CircuitStages {
    /// `Phi-_PR ⊗ Phi+_QS ⊗ Phi+_TU`
    pub initial: PureState,
    /// after `H` on `P` and on `Q`
    pub after_hadamards: PureState,
    /// after the `(P,R)`-controlled operator
    pub after_pr_control: PureState,
    /// after the `(Q,S)`-controlled operator
    pub output: PureState,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Runs the circuit that builds Eve's resource from three Bell pairs.
///
/// The `(P,R)`-controlled step applies `Z` on `Q` for `Phi+`, identity for
/// `Phi-` and `Psi+`, and `-1` for `Psi-`. The `(Q,S)`-controlled step applies
/// `X_P Z_T` for `Phi-`, `Z_P X_T` for `Psi+` and `(iY)_P (iY)_T` for `Psi-`,
/// with `qs_phi_minus_phase` multiplying the `Phi-` branch.
///
/// With `qs_phi_minus_phase = 1` the output differs from [`prepare_delta`]
/// by a relative sign on the `Phi-_PR Phi-_QS Phi-_TU` component; `-1` on that
/// branch reproduces the resource state exactly.
pub fn prepare_delta_circuit_stages(
    labels: [QubitId; 6],
    initial_pr: BellOutcome,
    qs_phi_minus_phase: Complex64,
) -> Result<CircuitStages> {
    six_distinct(labels)?;
    let [p, q, r, s, t, u] = labels;
    let initial = bell_pair(p, r, initial_pr)?
        .tensor(&bell_pair(q, s, BellOutcome::PhiPlus)?)?
        .tensor(&bell_pair(t, u, BellOutcome::PhiPlus)?)?
        .reordered(&labels)?;
    let after_hadamards = initial.apply_hadamard(p)?.apply_hadamard(q)?;

    let one = c(1.0, 0.0);
    let pr_action = BranchAction::identity()
        .with_branch(BellOutcome::PhiPlus, one, vec![(q, PauliOp::Z)])
        .with_branch(BellOutcome::PsiMinus, c(-1.0, 0.0), Vec::new());
    let after_pr_control = after_hadamards.apply_bell_conditioned((p, r), &pr_action)?;

    // (iY) ⊗ (iY) = -(Y ⊗ Y)
    let qs_action = BranchAction::identity()
        .with_branch(
            BellOutcome::PhiMinus,
            qs_phi_minus_phase,
            vec![(p, PauliOp::X), (t, PauliOp::Z)],
        )
        .with_branch(BellOutcome::PsiPlus, one, vec![(p, PauliOp::Z), (t, PauliOp::X)])
        .with_branch(
            BellOutcome::PsiMinus,
            c(-1.0, 0.0),
            vec![(p, PauliOp::Y), (t, PauliOp::Y)],
        );
    let output = after_pr_control.apply_bell_conditioned((q, s), &qs_action)?;
    Ok(CircuitStages {
        initial,
        after_hadamards,
        after_pr_control,
        output,
    })
}

/// Output of the preparation circuit with its operators taken literally.
pub fn prepare_delta_circuit(labels: [QubitId; 6]) -> Result<PureState> {
    Ok(prepare_delta_circuit_stages(labels, BellOutcome::PhiMinus, c(1.0, 0.0))?.output)
}

/// Preparation circuit with an extra `-1` on the `Phi-_QS` branch of the
/// second controlled operator, which makes it produce the resource state.
pub fn prepare_delta_phase_fixed(labels: [QubitId; 6]) -> Result<PureState> {
    Ok(prepare_delta_circuit_stages(labels, BellOutcome::PhiMinus, c(-1.0, 0.0))?.output)
}

/// Normalized superposition `Σ coeff_k |state_k>`; all states must share a
/// label set and the result uses the first state's order.
pub fn superpose(terms: &[(Complex64, PureState)]) -> Result<PureState> {
    let first = terms.first().ok_or(KernelError::LabelMismatch)?;
    let labels = first.1.labels().to_vec();
    let mut amps = vec![c(0.0, 0.0); first.1.amplitudes().len()];
    for (coeff, st) in terms {
        let st = st.reordered(&labels)?;
        for (slot, a) in amps.iter_mut().zip(st.amplitudes()) {
            *slot += coeff * a;
        }
    }
    PureState::normalized(labels, amps)
}

/// Product of Bell states on the given pairs, reordered to `order`.
pub fn bell_product(pairs: &[((QubitId, QubitId), BellOutcome)], order: &[QubitId]) -> Result<PureState> {
    let mut iter = pairs.iter();
    let &((a, b), which) = iter.next().ok_or(KernelError::LabelMismatch)?;
    let mut st = bell_pair(a, b, which)?;
    for &((a, b), which) in iter {
        st = st.tensor(&bell_pair(a, b, which)?)?;
    }
    st.reordered(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::labels::*;
    use crate::qkernel::EXACT_TOL;
    use BellOutcome::*;

    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    fn pair(a: QubitId, b: QubitId, w: BellOutcome) -> PureState {
        bell_pair(a, b, w).unwrap()
    }

    fn triple(pr: BellOutcome, qs: BellOutcome, tu: BellOutcome) -> PureState {
        bell_product(&[((P, R), pr), ((Q, S), qs), ((T, U), tu)], &PQRSTU).unwrap()
    }

    #[test]
    fn omega_and_chi_coefficients() {
        let cases = [
            (omega(Q1, Q2, Sign::Plus), [(1.0, PhiMinus), (1.0, PsiPlus)]),
            (omega(Q1, Q2, Sign::Minus), [(1.0, PhiPlus), (-1.0, PsiMinus)]),
            (chi(Q1, Q2, Sign::Plus), [(1.0, PsiMinus), (1.0, PhiPlus)]),
            (chi(Q1, Q2, Sign::Minus), [(1.0, PsiPlus), (-1.0, PhiMinus)]),
        ];
        for (state, terms) in cases {
            let state = state.unwrap();
            let expect = superpose(&[
                (r(terms[0].0), pair(Q1, Q2, terms[0].1)),
                (r(terms[1].0), pair(Q1, Q2, terms[1].1)),
            ])
            .unwrap();
            // exact equality, not only up to phase
            for (a, b) in state.amplitudes().iter().zip(expect.amplitudes()) {
                assert!((a - b).norm() < EXACT_TOL);
            }
        }
    }

    #[test]
    fn delta_amplitudes() {
        let d = prepare_delta(PQRSTU).unwrap();
        let amp = 1.0 / (2.0 * 2f64.sqrt());
        assert!((d.amplitude_of("000000") - r(amp)).norm() < EXACT_TOL);
        assert!(d.amplitude_of("000001").norm() < EXACT_TOL);
        let nonzero = d.amplitudes().iter().filter(|a| a.norm() > EXACT_TOL).count();
        assert_eq!(nonzero, 8);
        assert_eq!(
            prepare_delta([P, Q, R, S, T, P]).unwrap_err(),
            KernelError::DuplicateLabel(P)
        );
    }

    #[test]
    fn delta_regroups_into_matched_triples() {
        let d = prepare_delta(PQRSTU).unwrap();
        for a in BellOutcome::ALL {
            for b in BellOutcome::ALL {
                for cc in BellOutcome::ALL {
                    let amp = triple(a, b, cc).inner(&d).unwrap();
                    let expect = if a == b && b == cc { 0.5 } else { 0.0 };
                    assert!((amp - r(expect)).norm() < EXACT_TOL, "{a} {b} {cc}: {amp}");
                }
            }
        }
    }

    #[test]
    fn circuit_intermediate_states() {
        let stages = prepare_delta_circuit_stages(PQRSTU, PhiMinus, r(1.0)).unwrap();
        let after_h = superpose(&[
            (r(1.0), triple(PhiPlus, PhiMinus, PhiPlus)),
            (r(1.0), triple(PhiPlus, PsiPlus, PhiPlus)),
            (r(-1.0), triple(PsiMinus, PhiMinus, PhiPlus)),
            (r(-1.0), triple(PsiMinus, PsiPlus, PhiPlus)),
        ])
        .unwrap();
        assert!(stages
            .after_hadamards
            .equal_up_to_global_phase(&after_h, EXACT_TOL)
            .unwrap());
        let after_pr = superpose(&[
            (r(1.0), triple(PhiPlus, PhiPlus, PhiPlus)),
            (r(1.0), triple(PhiPlus, PsiMinus, PhiPlus)),
            (r(1.0), triple(PsiMinus, PhiMinus, PhiPlus)),
            (r(1.0), triple(PsiMinus, PsiPlus, PhiPlus)),
        ])
        .unwrap();
        assert!(stages
            .after_pr_control
            .equal_up_to_global_phase(&after_pr, EXACT_TOL)
            .unwrap());
    }

    #[test]
    fn literal_circuit_misses_one_sign() {
        let d = prepare_delta(PQRSTU).unwrap();
        let out = prepare_delta_circuit(PQRSTU).unwrap();
        assert!((out.fidelity(&d).unwrap() - 0.25).abs() < EXACT_TOL);
        let flipped = superpose(&[
            (r(1.0), triple(PhiPlus, PhiPlus, PhiPlus)),
            (r(-1.0), triple(PhiMinus, PhiMinus, PhiMinus)),
            (r(1.0), triple(PsiPlus, PsiPlus, PsiPlus)),
            (r(1.0), triple(PsiMinus, PsiMinus, PsiMinus)),
        ])
        .unwrap();
        assert!(out.equal_up_to_global_phase(&flipped, EXACT_TOL).unwrap());
    }

    #[test]
    fn phase_fixed_circuit_builds_delta() {
        let d = prepare_delta(PQRSTU).unwrap();
        let out = prepare_delta_phase_fixed(PQRSTU).unwrap();
        assert!(out.equal_up_to_global_phase(&d, EXACT_TOL).unwrap());
    }
}
