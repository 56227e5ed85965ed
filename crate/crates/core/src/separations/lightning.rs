//! Cloning a toy quantum-lightning bolt with one QCol query.
//!
//! The generator is a circuit whose output splits into a serial register `A`
//! and a bolt register `B`. The verifier for serial `s` is the rank-1
//! projector onto the generator's own post-measurement bolt `|ψ_s⟩`.

use rand::Rng;

use crate::bits::BitString;
use crate::circuit::{canonical_encode, simulate, OracleAidedCircuit, SimError};
use crate::cloners::{qcol_apply, KeyedState, QColError};
use crate::gen::{random_oracle_circuit, XOR_1_1};
use crate::oracle::Oracle;
use crate::qstate::{measure, BotExtendedState, StateError, C64, PROB_EPS};

#[derive(Debug, thiserror::Error)]
pub enum LightningError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    QCol(#[from] QColError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LightningScheme {
    pub circuit: OracleAidedCircuit,
}

/// A verifier: the bolt `|ψ_s⟩` for every serial with `p_s > 0`.
#[derive(Clone, Debug)]
pub struct Verifier {
    bolt_qubits: usize,
    bolts: Vec<(BitString, f64, Vec<C64>)>,
}

/// A measured serial and the joint state of the two bolt registers, bit `j`
/// of the first copy at position `j` and of the second at `|B| + j`.
#[derive(Clone, Debug)]
pub struct CloneOutcome {
    pub serial: BitString,
    pub bolts: BotExtendedState,
}

impl LightningScheme {
    pub fn new(circuit: OracleAidedCircuit, serial: Vec<usize>, bolt: Vec<usize>) -> Self {
        LightningScheme { circuit: circuit.with_split(serial, bolt) }
    }

    pub fn serial_len(&self) -> usize {
        self.circuit.split.a.len()
    }

    pub fn bolt_len(&self) -> usize {
        self.circuit.split.b.len()
    }

    /// Serial probabilities and bolts, read off the generator's output.
    pub fn verifier(&self, o: &dyn Oracle) -> Result<Verifier, LightningError> {
        let out = simulate(&self.circuit, o)?;
        let (a, b) = (&self.circuit.split.a, &self.circuit.split.b);
        let mut bolts = Vec::new();
        for (s, p, post) in out.branches(a)? {
            let amps = post.amplitudes();
            let psi = (0..1usize << b.len())
                .map(|v| {
                    let mut i = 0;
                    for (j, &q) in a.iter().enumerate() {
                        i |= ((s.value() as usize >> j) & 1) << q;
                    }
                    for (j, &q) in b.iter().enumerate() {
                        i |= ((v >> j) & 1) << q;
                    }
                    amps[i]
                })
                .collect();
            bolts.push((s, p, psi));
        }
        Ok(Verifier { bolt_qubits: b.len(), bolts })
    }
}

impl Verifier {
    pub fn bolt(&self, s: &BitString) -> Option<&[C64]> {
        self.bolts.iter().find(|(t, _, _)| t == s).map(|(_, _, psi)| psi.as_slice())
    }

    /// `‖Π_s ρ‖²` for a single bolt register.
    pub fn accept(&self, s: &BitString, bolt: &[C64]) -> f64 {
        self.bolt(s).map_or(0.0, |psi| psi.iter().zip(bolt).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr())
    }

    /// Probability that both registers of `pair` pass `Ver(s, ·)`.
    pub fn accept_both(&self, s: &BitString, pair: &[C64]) -> f64 {
        let Some(psi) = self.bolt(s) else { return 0.0 };
        let d = 1 << self.bolt_qubits;
        let mut amp = C64::new(0.0, 0.0);
        for (b1, x) in psi.iter().enumerate() {
            for (b2, y) in psi.iter().enumerate() {
                amp += (x * y).conj() * pair[b1 | (b2 * d)];
            }
        }
        amp.norm_sqr()
    }

    /// `Σ_s p_s · Ver(s, |ψ_s⟩)` for the honest generator.
    pub fn generator_rate(&self) -> f64 {
        self.bolts.iter().map(|(s, p, psi)| p * self.accept(s, psi)).sum()
    }
}

/// `QCol` applied to `|U⟩|⊥⟩`: the doubled state over `A, B, B′`.
pub fn cloned_state(scheme: &LightningScheme, o: &dyn Oracle) -> Result<BotExtendedState, LightningError> {
    let w = scheme.serial_len() + 2 * scheme.bolt_len();
    let keyed = KeyedState::key_bot(vec![canonical_encode(&scheme.circuit)], w, 0)?;
    let out = qcol_apply(&keyed, o);
    Ok(BotExtendedState::from_amplitudes(w, out.block(0).to_vec(), true)?)
}

fn bolt_pair(post: &BotExtendedState, a: usize, b: usize, s: &BitString) -> Result<BotExtendedState, StateError> {
    let amps: Vec<C64> = (0..1usize << (2 * b)).map(|v| post.amplitudes()[s.value() as usize | (v << a)]).collect();
    BotExtendedState::from_amplitudes(2 * b, amps, false)
}

/// Query QCol on the generator, measure the serial, keep both bolts.
pub fn lightning_clone<R: Rng + ?Sized>(
    scheme: &LightningScheme,
    o: &dyn Oracle,
    rng: &mut R,
) -> Result<CloneOutcome, LightningError> {
    let doubled = cloned_state(scheme, o)?;
    let a = scheme.serial_len();
    let (serial, post) = measure(&doubled, &(0..a).collect::<Vec<_>>(), rng)?;
    let bolts = bolt_pair(&post, a, scheme.bolt_len(), &serial)?;
    Ok(CloneOutcome { serial, bolts })
}

/// Exact probability that the cloner's serial is accepted on both bolts.
pub fn both_verify_rate(scheme: &LightningScheme, ver: &Verifier, o: &dyn Oracle) -> Result<f64, LightningError> {
    let doubled = cloned_state(scheme, o)?;
    let a = scheme.serial_len();
    let mut total = 0.0;
    for (s, p, post) in doubled.branches(&(0..a).collect::<Vec<_>>())? {
        if p < PROB_EPS {
            continue;
        }
        let pair = bolt_pair(&post, a, scheme.bolt_len(), &s)?;
        total += p * ver.accept_both(&s, pair.amplitudes());
    }
    Ok(total)
}

/// A generator over 1 to 2 serial and 1 to 2 bolt qubits, with up to two
/// xor calls to a 1-bit oracle.
pub fn random_scheme<R: Rng + ?Sized>(rng: &mut R) -> LightningScheme {
    let a = rng.gen_range(1..=2);
    let b = rng.gen_range(1..=2);
    let nq = a + b;
    let mut qubits: Vec<usize> = (0..nq).collect();
    rand::seq::SliceRandom::shuffle(qubits.as_mut_slice(), rng);
    let calls = rng.gen_range(0..=2);
    let circuit = random_oracle_circuit(nq, calls, rng.gen_range(1..=2 * nq), XOR_1_1, rng);
    LightningScheme::new(circuit, qubits[..a].to_vec(), qubits[a..].to_vec())
}
