//! Oracle-aided circuits: gate list, output split, validation and conjugation.
//!
//! Encoding and the text format live in [`encode`] and [`text`]; simulation in
//! [`sim`]; the λ-bit classical programs used by the obfuscation bundle in
//! [`classical`].

pub mod classical;
pub mod encode;
pub mod sim;
pub mod text;

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{C64, MAX_QUBITS, TOL};

pub use encode::{canonical_decode, canonical_encode, DecodeError};
pub use sim::{simulate, simulate_from, simulate_traced, QueryTrace, SimError};
pub use text::{parse_text, to_text, TextError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleStyle {
    Xor,
    Phase,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    /// Row-major 2×2 literal.
    U1(usize, [C64; 4]),
    /// Row-major 4×4 literal with local index `2·bit(a) + bit(b)`.
    U2(usize, usize, [C64; 16]),
    Oracle {
        style: OracleStyle,
        query: Vec<usize>,
        response: Vec<usize>,
    },
    /// Segment boundary of the measurement-interleaved form.
    Measure(Vec<usize>),
}

/// Output registers: `a` is the classical part, `b` the state part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputSplit {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleAidedCircuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    pub split: OutputSplit,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("{0} qubits exceeds the {MAX_QUBITS}-qubit budget")]
    TooManyQubits(usize),
    #[error("gate {gate}: qubit {qubit} out of range")]
    QubitOutOfRange { gate: usize, qubit: usize },
    #[error("gate {0}: repeated qubit")]
    RepeatedQubit(usize),
    #[error("gate {0}: matrix literal is not unitary")]
    NotUnitary(usize),
    #[error("gate {0}: phase oracle call with a response register")]
    PhaseWithResponse(usize),
    #[error("output split is not a partition of the qubits")]
    BadSplit,
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Gate {
    /// Qubits the gate touches, in operand order.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::S(q) | Gate::Sdg(q) | Gate::T(q) | Gate::Tdg(q) => {
                vec![*q]
            }
            Gate::U1(q, _) => vec![*q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::U2(a, b, _) => vec![*a, *b],
            Gate::Oracle { query, response, .. } => query.iter().chain(response).copied().collect(),
            Gate::Measure(qs) => qs.clone(),
        }
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, Gate::Oracle { .. })
    }

    /// 2×2 matrix of a named or literal single-qubit gate.
    pub fn matrix_1q(&self) -> Option<[C64; 4]> {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let h = c(FRAC_1_SQRT_2, 0.0);
        Some(match self {
            Gate::H(_) => [h, h, h, -h],
            Gate::X(_) => [z, o, o, z],
            Gate::Z(_) => [o, z, z, -o],
            Gate::S(_) => [o, z, z, c(0.0, 1.0)],
            Gate::Sdg(_) => [o, z, z, c(0.0, -1.0)],
            Gate::T(_) => [o, z, z, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)],
            Gate::Tdg(_) => [o, z, z, c(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)],
            Gate::U1(_, m) => *m,
            _ => return None,
        })
    }

    pub fn matrix_2q(&self) -> Option<[C64; 16]> {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        Some(match self {
            Gate::Cnot(..) => [o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z],
            Gate::Cz(..) => [o, z, z, z, z, o, z, z, z, z, o, z, z, z, z, -o],
            Gate::U2(_, _, m) => *m,
            _ => return None,
        })
    }

    /// True when the gate cannot change the computational-basis value of `q`.
    pub fn preserves_basis_of(&self, q: usize) -> bool {
        if !self.qubits().contains(&q) {
            return true;
        }
        match self {
            Gate::Z(_) | Gate::S(_) | Gate::Sdg(_) | Gate::T(_) | Gate::Tdg(_) | Gate::Cz(..) => true,
            Gate::Cnot(ctrl, _) => *ctrl == q,
            Gate::U1(_, m) => m[1].norm() < TOL && m[2].norm() < TOL,
            Gate::U2(_, _, m) => (0..4).all(|r| (0..4).all(|k| r == k || m[4 * r + k].norm() < TOL)),
            Gate::Oracle { style, response, .. } => *style == OracleStyle::Phase || !response.contains(&q),
            Gate::Measure(_) => true,
            _ => false,
        }
    }

    /// Entrywise complex conjugate; oracle calls and measurements unchanged.
    pub fn conjugate(&self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::T(q) => Gate::Tdg(*q),
            Gate::Tdg(q) => Gate::T(*q),
            Gate::U1(q, m) => Gate::U1(*q, m.map(|x| x.conj())),
            Gate::U2(a, b, m) => Gate::U2(*a, *b, m.map(|x| x.conj())),
            g => g.clone(),
        }
    }
}

fn is_unitary(m: &[C64], d: usize) -> bool {
    for i in 0..d {
        for j in 0..d {
            let dot: C64 = (0..d).map(|k| m[k * d + i].conj() * m[k * d + j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (dot - c(want, 0.0)).norm() > TOL || !dot.re.is_finite() {
                return false;
            }
        }
    }
    true
}

fn distinct(qs: &[usize]) -> bool {
    qs.iter().enumerate().all(|(k, q)| !qs[..k].contains(q))
}

impl OracleAidedCircuit {
    /// Empty circuit with every qubit in the A register.
    pub fn new(num_qubits: usize) -> Self {
        OracleAidedCircuit {
            num_qubits,
            gates: Vec::new(),
            split: OutputSplit { a: (0..num_qubits).collect(), b: Vec::new() },
        }
    }

    pub fn with_gates(num_qubits: usize, gates: Vec<Gate>) -> Self {
        OracleAidedCircuit { gates, ..Self::new(num_qubits) }
    }

    pub fn with_split(mut self, a: Vec<usize>, b: Vec<usize>) -> Self {
        self.split = OutputSplit { a, b };
        self
    }

    pub fn push(&mut self, g: Gate) -> &mut Self {
        self.gates.push(g);
        self
    }

    pub fn oracle_calls(&self) -> usize {
        self.gates.iter().filter(|g| g.is_oracle()).count()
    }

    pub fn has_measurements(&self) -> bool {
        self.gates.iter().any(|g| matches!(g, Gate::Measure(_)))
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.num_qubits > MAX_QUBITS {
            return Err(CircuitError::TooManyQubits(self.num_qubits));
        }
        for (i, g) in self.gates.iter().enumerate() {
            let qs = g.qubits();
            if let Some(&q) = qs.iter().find(|&&q| q >= self.num_qubits) {
                return Err(CircuitError::QubitOutOfRange { gate: i, qubit: q });
            }
            if !distinct(&qs) {
                return Err(CircuitError::RepeatedQubit(i));
            }
            match g {
                Gate::U1(_, m) if !is_unitary(m, 2) => return Err(CircuitError::NotUnitary(i)),
                Gate::U2(_, _, m) if !is_unitary(m, 4) => return Err(CircuitError::NotUnitary(i)),
                Gate::Oracle { style: OracleStyle::Phase, response, .. } if !response.is_empty() => {
                    return Err(CircuitError::PhaseWithResponse(i))
                }
                _ => {}
            }
        }
        let mut all: Vec<usize> = self.split.a.iter().chain(&self.split.b).copied().collect();
        all.sort_unstable();
        if all != (0..self.num_qubits).collect::<Vec<_>>() {
            return Err(CircuitError::BadSplit);
        }
        Ok(())
    }
}

/// Entrywise conjugate circuit (S ↔ S†, T ↔ T†, literals conjugated).
pub fn conjugate_circuit(c: &OracleAidedCircuit) -> OracleAidedCircuit {
    OracleAidedCircuit {
        num_qubits: c.num_qubits,
        gates: c.gates.iter().map(Gate::conjugate).collect(),
        split: c.split.clone(),
    }
}
