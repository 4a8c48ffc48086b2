//! Exact and sampled detection statistics.
//!
//! Exact values come from walking every branch of a round: Alice's Pauli,
//! the Hadamard flag, Eve's coins and each Bell measurement. All branch
//! weights in this protocol are dyadic, so they are snapped to exact
//! rationals and the totals carry no rounding error. Monte Carlo runs are
//! confirmatory only.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::adversary::AttackKind;
use crate::protocol::{run_round, Choice, Distribution, RoundConfig, RoundTranscript, Variant};
use crate::qkernel::{BellOutcome, Outcomes, PauliOp, Sampler, ZERO_PROB};
use crate::{Error, Result};

/// Largest power of two accepted as a weight denominator.
const MAX_DYADIC_EXPONENT: i32 = 24;

/// Probability held as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Probability(pub BigRational);

impl Probability {
    pub fn zero() -> Self {
        Probability(BigRational::zero())
    }

    pub fn one() -> Self {
        Probability(BigRational::one())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Probability(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Snaps a floating-point weight to the nearest dyadic rational.
    pub fn dyadic(w: f64) -> Result<Self> {
        for k in 0..=MAX_DYADIC_EXPONENT {
            let scale = f64::powi(2.0, k);
            let num = (w * scale).round();
            if (w - num / scale).abs() <= 1e-12 {
                return Ok(Probability(BigRational::new(
                    BigInt::from(num as i64),
                    BigInt::from(1i64 << k),
                )));
            }
        }
        Err(Error::NonDyadic(w))
    }

    pub fn value(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn complement(&self) -> Self {
        Probability(BigRational::one() - &self.0)
    }

    pub fn powu(&self, n: u32) -> Self {
        Probability(num_traits::pow(self.0.clone(), n as usize))
    }

    /// `self / other`, or `None` when `other` is zero.
    pub fn conditional_on(&self, other: &Probability) -> Option<Self> {
        (!other.0.is_zero()).then(|| Probability(&self.0 / &other.0))
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Probability", 2)?;
        st.serialize_field("exact", &self.0.to_string())?;
        st.serialize_field("value", &self.value())?;
        st.end()
    }
}

/// A protocol variant paired with an eavesdropping strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub variant: Variant,
    pub distribution: Distribution,
    pub attack: AttackKind,
}

impl Scenario {
    /// Uses the distribution the attack is defined for.
    pub fn new(variant: Variant, attack: AttackKind) -> Self {
        let distribution = match attack {
            AttackKind::InterceptResend => Distribution::AlicePreparesBoth,
            _ => Distribution::Exchange,
        };
        Scenario {
            variant,
            distribution,
            attack,
        }
    }

    pub fn with_distribution(mut self, distribution: Distribution) -> Self {
        self.distribution = distribution;
        self
    }

    pub fn check(&self) -> Result<()> {
        self.attack.check_compatible(self.variant, self.distribution)
    }

    pub fn round_config(&self) -> RoundConfig {
        RoundConfig::new(self.variant).with_distribution(self.distribution)
    }

    pub fn run_round(&self, cfg: &RoundConfig, outcomes: &mut dyn Outcomes) -> Result<RoundTranscript> {
        let mut hooks = self.attack.hooks()?;
        run_round(cfg, hooks.as_mut(), outcomes)
    }

    /// Per-round probability of going unnoticed claimed for this pairing, if
    /// one is known in closed form.
    pub fn closed_form_undetected(&self) -> Option<Probability> {
        use AttackKind::*;
        match (self.variant, self.attack) {
            (_, None) | (_, InterceptResend) => Some(Probability::one()),
            (Variant::Original, DeltaSwap | SourceControl) => Some(Probability::one()),
            (Variant::Modified, DeltaSwap | DeltaSwapHPre | DeltaSwapRandomH | SourceControl) => {
                Some(Probability::ratio(3, 4))
            }
            (Variant::Modified, DelayedMeasurement) => Some(Probability::ratio(1, 4)),
            _ => Option::None,
        }
    }

    /// `1 − q^n` for the closed-form undetected probability `q`.
    pub fn closed_form_session(&self, n: u32) -> Option<f64> {
        self.closed_form_undetected().map(|q| 1.0 - q.value().powi(n as i32))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {} / {}", self.variant, self.attack, self.distribution)
    }
}

/// Replays a fixed prefix of decisions, then always takes the first possible
/// branch, recording the weights seen at every decision.
struct Replay {
    script: Vec<usize>,
    trail: Vec<(Vec<f64>, usize)>,
}

impl Outcomes for Replay {
    fn choose(&mut self, weights: &[f64]) -> usize {
        let pos = self.trail.len();
        let i = match self.script.get(pos) {
            Some(&i) => i,
            None => weights
                .iter()
                .position(|&w| w > ZERO_PROB)
                .expect("at least one branch must have positive weight"),
        };
        self.trail.push((weights.to_vec(), i));
        i
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub weight: Probability,
    pub transcript: RoundTranscript,
}

/// Every branch of one round with its exact probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchEnumeration {
    pub branches: Vec<Branch>,
}

impl BranchEnumeration {
    pub fn total(&self) -> Probability {
        self.probability(|_| true)
    }

    pub fn probability(&self, pred: impl Fn(&RoundTranscript) -> bool) -> Probability {
        let mut acc = BigRational::zero();
        for b in &self.branches {
            if pred(&b.transcript) {
                acc += &b.weight.0;
            }
        }
        Probability(acc)
    }

    /// `P(event | given)`, or `None` if `given` never happens.
    pub fn conditional(
        &self,
        event: impl Fn(&RoundTranscript) -> bool,
        given: impl Fn(&RoundTranscript) -> bool,
    ) -> Option<Probability> {
        let joint = self.probability(|t| given(t) && event(t));
        joint.conditional_on(&self.probability(given))
    }

    pub fn float_total(&self) -> f64 {
        self.branches.iter().map(|b| b.weight.value()).sum()
    }
}

/// Walks every branch of a round under `cfg`. Choices fixed in `cfg` are
/// not branched over.
pub fn enumerate_round(scenario: &Scenario, cfg: &RoundConfig) -> Result<BranchEnumeration> {
    scenario.check()?;
    let mut branches = Vec::new();
    let mut script: Vec<usize> = Vec::new();
    loop {
        let mut replay = Replay {
            script: script.clone(),
            trail: Vec::new(),
        };
        let transcript = scenario.run_round(cfg, &mut replay)?;
        let mut weight = BigRational::one();
        for (w, i) in &replay.trail {
            weight *= Probability::dyadic(w[*i])?.0;
        }
        branches.push(Branch {
            weight: Probability(weight),
            transcript,
        });

        let next = replay
            .trail
            .iter()
            .enumerate()
            .rev()
            .find_map(|(d, (w, i))| (i + 1..w.len()).find(|&j| w[j] > ZERO_PROB).map(|j| (d, j)));
        match next {
            Some((d, j)) => {
                script = replay.trail[..d].iter().map(|(_, i)| *i).collect();
                script.push(j);
            }
            None => break,
        }
    }
    Ok(BranchEnumeration { branches })
}

fn eve_agrees(t: &RoundTranscript) -> bool {
    t.eve_bits() == Some(t.key_bits)
}

/// Exact per-round statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundStats {
    pub detection: Probability,
    /// Only for the modified protocol.
    pub detection_without_h: Option<Probability>,
    pub detection_with_h: Option<Probability>,
    /// `None` when there is no eavesdropper.
    pub eve_agreement: Option<Probability>,
    pub eve_agreement_without_h: Option<Probability>,
    pub eve_agreement_with_h: Option<Probability>,
    pub branches: usize,
}

pub fn exact_round_stats(scenario: &Scenario) -> Result<RoundStats> {
    let e = enumerate_round(scenario, &scenario.round_config())?;
    let det = |t: &RoundTranscript| t.detected;
    let modified = scenario.variant == Variant::Modified;
    let reads = scenario.attack.reads_key();
    let cond = |event: &dyn Fn(&RoundTranscript) -> bool, h: bool| {
        if modified {
            e.conditional(event, |t| t.hadamard_flag == h)
        } else {
            None
        }
    };
    let agree_cond = |h| if reads { cond(&eve_agrees, h) } else { None };
    Ok(RoundStats {
        detection: e.probability(det),
        detection_without_h: cond(&det, false),
        detection_with_h: cond(&det, true),
        eve_agreement: reads.then(|| e.probability(eve_agrees)),
        eve_agreement_without_h: agree_cond(false),
        eve_agreement_with_h: agree_cond(true),
        branches: e.branches.len(),
    })
}

/// Rounds actually compared in a session of `n` rounds.
pub fn compared_rounds(n: u32, compare_fraction: f64) -> Result<u32> {
    if !(compare_fraction > 0.0 && compare_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "compare fraction must lie in (0, 1], got {compare_fraction}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("a session needs at least one round".into()));
    }
    Ok(((n as f64 * compare_fraction).ceil() as u32).clamp(1, n))
}

/// `1 − (1 − d)^m` for per-round detection `d` over `m` compared rounds.
pub fn session_from_round(detection: &Probability, compared: u32) -> Probability {
    detection.complement().powu(compared).complement()
}

/// Probability that a session of `n` rounds, all compared, flags Eve.
pub fn session_detection(scenario: &Scenario, n: u32) -> Result<Probability> {
    session_detection_compared(scenario, n, 1.0)
}

pub fn session_detection_compared(scenario: &Scenario, n: u32, compare_fraction: f64) -> Result<Probability> {
    let m = compared_rounds(n, compare_fraction)?;
    Ok(session_from_round(&exact_round_stats(scenario)?.detection, m))
}

/// Counts from a Monte Carlo run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MonteCarloCounts {
    pub sessions: u64,
    pub detected_sessions: u64,
    pub rounds: u64,
    pub detected_rounds: u64,
    pub eve_agreements: u64,
}

impl MonteCarloCounts {
    fn merge(self, o: Self) -> Self {
        MonteCarloCounts {
            sessions: self.sessions + o.sessions,
            detected_sessions: self.detected_sessions + o.detected_sessions,
            rounds: self.rounds + o.rounds,
            detected_rounds: self.detected_rounds + o.detected_rounds,
            eve_agreements: self.eve_agreements + o.eve_agreements,
        }
    }
}

/// Generator for one trial. Depends only on `(seed, trial)`, so the thread
/// schedule cannot change results.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` sessions of `n` rounds. A session counts as detected if any
/// of its first `compared` rounds is flagged.
pub fn monte_carlo_counts(
    scenario: &Scenario,
    n: u32,
    compared: u32,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloCounts> {
    scenario.check()?;
    let cfg = scenario.round_config();
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut sampler = Sampler::new(trial_rng(seed, trial));
            let mut c = MonteCarloCounts {
                sessions: 1,
                ..Default::default()
            };
            let mut flagged = false;
            for r in 0..n {
                let t = scenario.run_round(&cfg, &mut sampler)?;
                c.rounds += 1;
                c.detected_rounds += t.detected as u64;
                c.eve_agreements += eve_agrees(&t) as u64;
                flagged |= r < compared && t.detected;
            }
            c.detected_sessions = flagged as u64;
            Ok(c)
        })
        .try_reduce(MonteCarloCounts::default, |a, b| Ok(a.merge(b)))
}

/// Sampled estimate of an exactly known probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub count: u64,
    pub total: u64,
    pub rate: f64,
    /// Binomial standard error at the exact probability.
    pub standard_error: f64,
    /// Within four standard errors of the exact value, or equal to it when
    /// the standard error vanishes.
    pub consistent: bool,
}

impl Estimate {
    pub fn new(count: u64, total: u64, exact: &Probability) -> Self {
        let p = exact.value();
        let rate = if total == 0 { 0.0 } else { count as f64 / total as f64 };
        let standard_error = if total == 0 {
            0.0
        } else {
            (p * (1.0 - p) / total as f64).sqrt()
        };
        let consistent = if standard_error == 0.0 {
            (rate - p).abs() <= ZERO_PROB
        } else {
            (rate - p).abs() <= 4.0 * standard_error
        };
        Estimate {
            count,
            total,
            rate,
            standard_error,
            consistent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub seed: u64,
    pub session_detection: Estimate,
    pub round_detection: Estimate,
    pub eve_agreement: Option<Estimate>,
}

impl MonteCarloReport {
    pub fn consistent(&self) -> bool {
        self.session_detection.consistent
            && self.round_detection.consistent
            && self.eve_agreement.as_ref().is_none_or(|e| e.consistent)
    }
}

/// Exact statistics for a session, with an optional Monte Carlo check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub scenario: Scenario,
    pub rounds: u32,
    pub compare_fraction: f64,
    pub compared_rounds: u32,
    pub exact: RoundStats,
    pub p_detect_session: Probability,
    pub closed_form_reference: Option<f64>,
    pub monte_carlo: Option<MonteCarloReport>,
}

/// Builds the report. `trials == 0` skips sampling.
pub fn detection_report(
    scenario: &Scenario,
    rounds: u32,
    compare_fraction: f64,
    trials: u64,
    seed: u64,
) -> Result<DetectionReport> {
    let compared = compared_rounds(rounds, compare_fraction)?;
    let exact = exact_round_stats(scenario)?;
    let p_session = session_from_round(&exact.detection, compared);
    let monte_carlo = if trials == 0 {
        None
    } else {
        let c = monte_carlo_counts(scenario, rounds, compared, trials, seed)?;
        Some(MonteCarloReport {
            trials,
            seed,
            session_detection: Estimate::new(c.detected_sessions, c.sessions, &p_session),
            round_detection: Estimate::new(c.detected_rounds, c.rounds, &exact.detection),
            eve_agreement: exact
                .eve_agreement
                .as_ref()
                .map(|p| Estimate::new(c.eve_agreements, c.rounds, p)),
        })
    };
    Ok(DetectionReport {
        scenario: *scenario,
        rounds,
        compare_fraction,
        compared_rounds: compared,
        closed_form_reference: scenario
            .closed_form_undetected()
            .map(|q| 1.0 - q.value().powi(compared as i32)),
        exact,
        p_detect_session: p_session,
        monte_carlo,
    })
}

/// Convenience wrapper comparing every round.
pub fn monte_carlo(scenario: &Scenario, n: u32, trials: u64, seed: u64) -> Result<DetectionReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least one trial".into()));
    }
    detection_report(scenario, n, 1.0, trials, seed)
}

/// Joint distribution of Alice's and Bob's results for one fixed Pauli and
/// Hadamard flag. Rows are Alice's outcome, columns Bob's, both in
/// `Phi+ Phi- Psi+ Psi-` order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub alice_pauli: PauliOp,
    /// `None` for the original protocol.
    pub hadamard: Option<bool>,
    pub joint: [[Probability; 4]; 4],
}

impl CorrelationTable {
    pub fn get(&self, alice: BellOutcome, bob: BellOutcome) -> &Probability {
        &self.joint[alice.index()][bob.index()]
    }
}

pub fn correlation_table(scenario: &Scenario) -> Result<Vec<CorrelationTable>> {
    let flags: &[Option<bool>] = match scenario.variant {
        Variant::Original => &[None],
        Variant::Modified => &[Some(false), Some(true)],
    };
    let mut out = Vec::new();
    for p in PauliOp::ALL {
        for &h in flags {
            let mut cfg = scenario.round_config().with_pauli(p);
            if let Some(h) = h {
                cfg.hadamard = Choice::Fixed(h);
            }
            let e = enumerate_round(scenario, &cfg)?;
            let joint = BellOutcome::ALL
                .map(|a| BellOutcome::ALL.map(|b| e.probability(|t| t.alice_result == a && t.bob_result == b)));
            out.push(CorrelationTable {
                alice_pauli: p,
                hadamard: h,
                joint,
            });
        }
    }
    Ok(out)
}
