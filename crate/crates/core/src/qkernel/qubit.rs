use std::fmt;

use serde::Serialize;

/// Symbolic qubit label such as `1`, `2`, `P` or `U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct QubitId(&'static str);

impl QubitId {
    pub const fn new(label: &'static str) -> Self {
        QubitId(label)
    }

    pub fn as_str(&self) -> &'static str {
        self.0
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// The labels used by the protocol and by Eve's resource state.
pub mod labels {
    use super::QubitId;

    pub const Q1: QubitId = QubitId::new("1");
    pub const Q2: QubitId = QubitId::new("2");
    pub const Q3: QubitId = QubitId::new("3");
    pub const Q4: QubitId = QubitId::new("4");
    pub const P: QubitId = QubitId::new("P");
    pub const Q: QubitId = QubitId::new("Q");
    pub const R: QubitId = QubitId::new("R");
    pub const S: QubitId = QubitId::new("S");
    pub const T: QubitId = QubitId::new("T");
    pub const U: QubitId = QubitId::new("U");

    /// Eve's six resource qubits in their canonical order.
    pub const PQRSTU: [QubitId; 6] = [P, Q, R, S, T, U];
}
