use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use super::qubit::QubitId;
use super::state::PureState;

pub type Matrix2 = [[Complex64; 2]; 2];

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Outcome of a Bell-basis measurement. The discriminant order matches the
/// two-bit key encoding `Phi+ -> 00`, `Phi- -> 01`, `Psi+ -> 10`, `Psi- -> 11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn bits(self) -> u8 {
        self as u8
    }

    pub fn from_bits(bits: u8) -> Option<Self> {
        Self::ALL.get(bits as usize).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Amplitudes over `|00>, |01>, |10>, |11>`.
    pub fn vector(self) -> [Complex64; 4] {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let z = c(0.0, 0.0);
        match self {
            BellOutcome::PhiPlus => [h, z, z, h],
            BellOutcome::PhiMinus => [h, z, z, -h],
            BellOutcome::PsiPlus => [z, h, h, z],
            BellOutcome::PsiMinus => [z, h, -h, z],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "Phi+",
            BellOutcome::PhiMinus => "Phi-",
            BellOutcome::PsiPlus => "Psi+",
            BellOutcome::PsiMinus => "Psi-",
        }
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Single-qubit Pauli operation, encoded `I -> 00`, `X -> 01`, `Y -> 10`,
/// `Z -> 11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::I, PauliOp::X, PauliOp::Y, PauliOp::Z];

    pub fn bits(self) -> u8 {
        self as u8
    }

    pub fn from_bits(bits: u8) -> Option<Self> {
        Self::ALL.get(bits as usize).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn matrix(self) -> Matrix2 {
        let o = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        match self {
            PauliOp::I => [[one, o], [o, one]],
            PauliOp::X => [[o, one], [one, o]],
            PauliOp::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
            PauliOp::Z => [[one, o], [o, -one]],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PauliOp::I => "I",
            PauliOp::X => "X",
            PauliOp::Y => "Y",
            PauliOp::Z => "Z",
        }
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub fn hadamard_matrix() -> Matrix2 {
    let h = c(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// The Bell label reached when `p` acts on the first qubit of `b`, phases
/// discarded.
///
/// The table is computed once by applying each Pauli to each Bell state and
/// identifying the image by fidelity.
pub fn pauli_bell_action(p: PauliOp, b: BellOutcome) -> BellOutcome {
    static TABLE: OnceLock<[[BellOutcome; 4]; 4]> = OnceLock::new();
    TABLE.get_or_init(build_action_table)[p.index()][b.index()]
}

fn build_action_table() -> [[BellOutcome; 4]; 4] {
    let a = QubitId::new("a");
    let b = QubitId::new("b");
    let mut table = [[BellOutcome::PhiPlus; 4]; 4];
    for p in PauliOp::ALL {
        for bell in BellOutcome::ALL {
            let image = PureState::bell_pair(a, b, bell)
                .and_then(|s| s.apply_pauli(a, p))
                .expect("two fresh labels");
            let probs = image.bell_distribution((a, b)).expect("labels present");
            let hit = BellOutcome::ALL
                .into_iter()
                .find(|o| (probs[o.index()] - 1.0).abs() < super::EXACT_TOL)
                .expect("a Pauli maps a Bell state onto a Bell state");
            table[p.index()][bell.index()] = hit;
        }
    }
    table
}
