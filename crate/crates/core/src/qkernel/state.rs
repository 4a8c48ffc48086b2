use std::collections::HashSet;

use num_complex::Complex64;

use super::gates::{hadamard_matrix, BellOutcome, Matrix2, PauliOp};
use super::qubit::QubitId;
use super::source::Outcomes;
use super::{KernelError, Result, EXACT_TOL, ZERO_PROB};

/// Normalized pure state over an ordered list of distinct qubit labels.
///
/// The first label is the most significant bit of the basis index. Every
/// operation returns a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    labels: Vec<QubitId>,
    amps: Vec<Complex64>,
}

fn check_unique(labels: &[QubitId]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for &l in labels {
        if !seen.insert(l) {
            return Err(KernelError::DuplicateLabel(l));
        }
    }
    Ok(())
}

impl PureState {
    /// Builds a state from raw amplitudes. The vector must already be
    /// normalized to within the exact tolerance.
    pub fn new(labels: Vec<QubitId>, amps: Vec<Complex64>) -> Result<Self> {
        check_unique(&labels)?;
        let expected = 1usize << labels.len();
        if amps.len() != expected {
            return Err(KernelError::BadLength {
                len: amps.len(),
                expected,
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(KernelError::NotNormalized(norm));
        }
        Ok(PureState { labels, amps })
    }

    /// Builds a state from amplitudes that are only known up to a positive
    /// scale factor; the result is renormalized.
    pub fn normalized(labels: Vec<QubitId>, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= ZERO_PROB {
            return Err(KernelError::NotNormalized(0.0));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::new(labels, amps)
    }

    /// Builds a state from a list of `(bitstring, coefficient)` terms, e.g.
    /// `("001101", 1.0)`. Coefficients are renormalized.
    pub fn from_kets(labels: &[QubitId], terms: &[(&str, Complex64)]) -> Result<Self> {
        let n = labels.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (bits, coeff) in terms {
            assert_eq!(bits.len(), n, "ket {bits} does not match {n} labels");
            let idx = usize::from_str_radix(bits, 2).expect("ket must be a binary string");
            amps[idx] += coeff;
        }
        Self::normalized(labels.to_vec(), amps)
    }

    pub fn basis(labels: &[QubitId], index: usize) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << labels.len()];
        if index >= amps.len() {
            return Err(KernelError::BadLength {
                len: index,
                expected: amps.len(),
            });
        }
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(labels.to_vec(), amps)
    }

    pub fn bell_pair(a: QubitId, b: QubitId, which: BellOutcome) -> Result<Self> {
        if a == b {
            return Err(KernelError::DuplicateLabel(a));
        }
        Self::new(vec![a, b], which.vector().to_vec())
    }

    pub fn labels(&self) -> &[QubitId] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.labels.contains(&q)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Amplitude of a computational basis state given as a bitstring in
    /// label order.
    pub fn amplitude_of(&self, bits: &str) -> Complex64 {
        let idx = usize::from_str_radix(bits, 2).expect("binary string");
        self.amps[idx]
    }

    fn mask(&self, q: QubitId) -> Result<usize> {
        let pos = self
            .labels
            .iter()
            .position(|&l| l == q)
            .ok_or(KernelError::UnknownLabel(q))?;
        Ok(1 << (self.labels.len() - 1 - pos))
    }

    fn pair_masks(&self, (a, b): (QubitId, QubitId)) -> Result<(usize, usize)> {
        if a == b {
            return Err(KernelError::DegeneratePair(a));
        }
        Ok((self.mask(a)?, self.mask(b)?))
    }

    /// Kronecker product; labels of `other` follow those of `self`.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        check_unique(&labels)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState { labels, amps })
    }

    /// Applies an arbitrary 2×2 matrix to qubit `q`. The caller is
    /// responsible for unitarity.
    pub fn apply_matrix(&self, q: QubitId, m: &Matrix2) -> Result<Self> {
        let mask = self.mask(q)?;
        let mut amps = self.amps.clone();
        for i in 0..amps.len() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                amps[i] = m[0][0] * a0 + m[0][1] * a1;
                amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(PureState {
            labels: self.labels.clone(),
            amps,
        })
    }

    pub fn apply_pauli(&self, q: QubitId, p: PauliOp) -> Result<Self> {
        if p == PauliOp::I {
            self.mask(q)?;
            return Ok(self.clone());
        }
        self.apply_matrix(q, &p.matrix())
    }

    pub fn apply_paulis(&self, ops: &[(QubitId, PauliOp)]) -> Result<Self> {
        ops.iter().try_fold(self.clone(), |s, &(q, p)| s.apply_pauli(q, p))
    }

    pub fn apply_hadamard(&self, q: QubitId) -> Result<Self> {
        self.apply_matrix(q, &hadamard_matrix())
    }

    /// Multiplies every amplitude by `phase`.
    pub fn scaled(&self, phase: Complex64) -> Self {
        PureState {
            labels: self.labels.clone(),
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    /// Returns the same state with labels in the requested order.
    pub fn reordered(&self, order: &[QubitId]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return Err(KernelError::LabelMismatch);
        }
        check_unique(order)?;
        let masks: Vec<usize> = order
            .iter()
            .map(|&q| self.mask(q).map_err(|_| KernelError::LabelMismatch))
            .collect::<Result<_>>()?;
        let n = order.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let mut old_idx = 0;
            for (pos, m) in masks.iter().enumerate() {
                if new_idx & (1 << (n - 1 - pos)) != 0 {
                    old_idx |= m;
                }
            }
            *slot = self.amps[old_idx];
        }
        Ok(PureState {
            labels: order.to_vec(),
            amps,
        })
    }

    /// Renames labels in place of position: `mapping` pairs old with new.
    pub fn relabeled(&self, mapping: &[(QubitId, QubitId)]) -> Result<Self> {
        let labels: Vec<QubitId> = self
            .labels
            .iter()
            .map(|&l| mapping.iter().find(|(old, _)| *old == l).map_or(l, |&(_, new)| new))
            .collect();
        check_unique(&labels)?;
        Ok(PureState {
            labels,
            amps: self.amps.clone(),
        })
    }

    /// `<self|other>`, after bringing `other` into this state's label order.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        let other = other.reordered(&self.labels)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// True iff `self = e^{iθ} other` within `tol` (amplitude-wise).
    pub fn equal_up_to_global_phase(&self, other: &PureState, tol: f64) -> Result<bool> {
        let other = other.reordered(&self.labels)?;
        let overlap: Complex64 = self.amps.iter().zip(&other.amps).map(|(a, b)| b.conj() * a).sum();
        if overlap.norm() <= ZERO_PROB {
            return Ok(false);
        }
        let phase = overlap / overlap.norm();
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a - phase * b).norm() <= tol))
    }

    /// Calls `f(rest, [c00, c01, c10, c11])` for every assignment of the
    /// qubits outside the pair.
    fn for_each_pair_block(&self, (ma, mb): (usize, usize), mut f: impl FnMut(usize, [Complex64; 4])) {
        for r in 0..self.amps.len() {
            if r & (ma | mb) == 0 {
                f(
                    r,
                    [
                        self.amps[r],
                        self.amps[r | mb],
                        self.amps[r | ma],
                        self.amps[r | ma | mb],
                    ],
                );
            }
        }
    }

    /// `<B|block>` for each Bell state, in [`BellOutcome::index`] order.
    fn bell_components(block: &[Complex64; 4]) -> [Complex64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let [c00, c01, c10, c11] = *block;
        [(c00 + c11) * h, (c00 - c11) * h, (c01 + c10) * h, (c01 - c10) * h]
    }

    fn bell_component(which: BellOutcome, block: &[Complex64; 4]) -> Complex64 {
        Self::bell_components(block)[which.index()]
    }

    /// Probabilities of the four Bell projectors on `pair`, indexed by
    /// [`BellOutcome::index`].
    pub fn bell_distribution(&self, pair: (QubitId, QubitId)) -> Result<[f64; 4]> {
        let masks = self.pair_masks(pair)?;
        let mut probs = [0.0; 4];
        self.for_each_pair_block(masks, |_, block| {
            for (p, c) in probs.iter_mut().zip(Self::bell_components(&block)) {
                *p += c.norm_sqr();
            }
        });
        Ok(probs)
    }

    /// Projects `pair` onto `which` and renormalizes. Returns the branch
    /// probability together with the post-measurement state.
    pub fn project_bell(&self, pair: (QubitId, QubitId), which: BellOutcome) -> Result<(f64, Self)> {
        let masks = self.pair_masks(pair)?;
        let (ma, mb) = masks;
        let v = which.vector();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let mut prob = 0.0;
        self.for_each_pair_block(masks, |r, block| {
            let x = Self::bell_component(which, &block);
            prob += x.norm_sqr();
            amps[r] = x * v[0];
            amps[r | mb] = x * v[1];
            amps[r | ma] = x * v[2];
            amps[r | ma | mb] = x * v[3];
        });
        if prob <= ZERO_PROB {
            return Err(KernelError::ZeroProbability {
                a: pair.0,
                b: pair.1,
                outcome: which,
            });
        }
        let scale = prob.sqrt();
        for a in &mut amps {
            *a /= scale;
        }
        Ok((
            prob,
            PureState {
                labels: self.labels.clone(),
                amps,
            },
        ))
    }

    /// Bell-basis measurement of `pair`. The outcome is drawn from
    /// [`Self::bell_distribution`] through `outcomes`; the pair is left in the
    /// reported Bell state.
    pub fn measure_bell<O: Outcomes + ?Sized>(
        &self,
        pair: (QubitId, QubitId),
        outcomes: &mut O,
    ) -> Result<(BellOutcome, Self)> {
        let probs = self.bell_distribution(pair)?;
        let which = BellOutcome::ALL[outcomes.choose(&probs)];
        let (_, post) = self.project_bell(pair, which)?;
        Ok((which, post))
    }

    /// Removes a pair that is known to be in Bell state `which`, returning
    /// the state of the remaining qubits.
    pub fn detach_bell_pair(&self, pair: (QubitId, QubitId), which: BellOutcome) -> Result<Self> {
        let (rest, amps) = self.contract_bell(pair, which)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(KernelError::NotSeparable {
                a: pair.0,
                b: pair.1,
                outcome: which,
            });
        }
        Self::normalized(rest, amps)
    }

    /// `<which|_pair ψ>` over the remaining qubits, unnormalized.
    fn contract_bell(&self, pair: (QubitId, QubitId), which: BellOutcome) -> Result<(Vec<QubitId>, Vec<Complex64>)> {
        let masks = self.pair_masks(pair)?;
        let (hi, lo) = (masks.0.max(masks.1), masks.0.min(masks.1));
        let rest: Vec<QubitId> = self
            .labels
            .iter()
            .copied()
            .filter(|&l| l != pair.0 && l != pair.1)
            .collect();
        // Deletes bit `m` from `x`, shifting the higher bits down.
        let drop = |x: usize, m: usize| (x & (m - 1)) | ((x >> 1) & !(m - 1));
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << rest.len()];
        self.for_each_pair_block(masks, |r, block| {
            amps[drop(drop(r, hi), lo)] = Self::bell_component(which, &block);
        });
        Ok((rest, amps))
    }

    /// Measures `pair` in the Bell basis and drops it from the state.
    pub fn measure_bell_and_detach<O: Outcomes + ?Sized>(
        &self,
        pair: (QubitId, QubitId),
        outcomes: &mut O,
    ) -> Result<(BellOutcome, Self)> {
        let probs = self.bell_distribution(pair)?;
        let which = BellOutcome::ALL[outcomes.choose(&probs)];
        let p = probs[which.index()];
        if p <= ZERO_PROB {
            return Err(KernelError::ZeroProbability {
                a: pair.0,
                b: pair.1,
                outcome: which,
            });
        }
        let (rest, mut amps) = self.contract_bell(pair, which)?;
        let scale = p.sqrt();
        for a in &mut amps {
            *a /= scale;
        }
        Ok((which, Self::new(rest, amps)?))
    }
}
