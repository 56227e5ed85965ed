//! The cloning unitary `QCol^O = Σ_C |C⟩⟨C| ⊗ QCol^O_C`.
//!
//! The key register ranges over an explicit list of circuit encodings. The
//! payload is `p` qubits plus a ⊥ dimension; the doubled state of a key is
//! embedded with zeros on any payload qubits beyond its own width.

use thiserror::Error;

use super::col::col_state;
use crate::compressed::swap_bot;
use crate::oracle::Oracle;
use crate::qstate::{C64, MAX_QUBITS, TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QColError {
    #[error("expected {expected} amplitudes, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("payload of {0} qubits exceeds the budget")]
    Payload(usize),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
}

/// A state over `key ⊗ (payload ⊕ ⊥)`, stored key-major.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyedState {
    keys: Vec<Vec<u8>>,
    payload_qubits: usize,
    amps: Vec<C64>,
}

impl KeyedState {
    pub fn new(keys: Vec<Vec<u8>>, payload_qubits: usize, amps: Vec<C64>) -> Result<Self, QColError> {
        if payload_qubits > MAX_QUBITS {
            return Err(QColError::Payload(payload_qubits));
        }
        let expected = keys.len() * ((1 << payload_qubits) + 1);
        if amps.len() != expected {
            return Err(QColError::Dimension { expected, got: amps.len() });
        }
        let s = KeyedState { keys, payload_qubits, amps };
        let n = s.norm();
        if (n - 1.0).abs() > TOL {
            return Err(QColError::NotNormalized(n));
        }
        Ok(s)
    }

    /// `|C_k⟩|⊥⟩`.
    pub fn key_bot(keys: Vec<Vec<u8>>, payload_qubits: usize, k: usize) -> Result<Self, QColError> {
        let block = (1 << payload_qubits) + 1;
        let mut amps = vec![C64::new(0.0, 0.0); keys.len() * block];
        amps[k * block + block - 1] = C64::new(1.0, 0.0);
        KeyedState::new(keys, payload_qubits, amps)
    }

    pub fn keys(&self) -> &[Vec<u8>] {
        &self.keys
    }

    pub fn payload_qubits(&self) -> usize {
        self.payload_qubits
    }

    pub fn block_dim(&self) -> usize {
        (1 << self.payload_qubits) + 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn block(&self, k: usize) -> &[C64] {
        let d = self.block_dim();
        &self.amps[k * d..(k + 1) * d]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &KeyedState) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `|ψ^O_C⟩` embedded in a `p`-qubit payload (⊥ last). The zero vector
/// stands for ⊥ itself, which makes the swap the identity.
pub fn embedded_col_state(key: &[u8], payload_qubits: usize, o: &dyn Oracle) -> Vec<C64> {
    let mut phi = vec![C64::new(0.0, 0.0); 1 << payload_qubits];
    let st = col_state(key, o);
    if let Some(s) = st.state() {
        if s.num_qubits() <= payload_qubits {
            phi[..s.dim()].copy_from_slice(s.amplitudes());
        }
    }
    phi
}

pub fn qcol_apply(target: &KeyedState, o: &dyn Oracle) -> KeyedState {
    let d = target.block_dim();
    let mut out = target.clone();
    for (k, key) in target.keys.iter().enumerate() {
        let block = &mut out.amps[k * d..(k + 1) * d];
        if block.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        swap_bot(&embedded_col_state(key, target.payload_qubits, o), block);
    }
    out
}

/// Row-major matrix of `QCol^O_C` on the `p`-qubit payload.
pub fn qcol_matrix(key: &[u8], payload_qubits: usize, o: &dyn Oracle) -> Vec<C64> {
    let phi = embedded_col_state(key, payload_qubits, o);
    let d = phi.len() + 1;
    let mut m = vec![C64::new(0.0, 0.0); d * d];
    for col in 0..d {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[col] = C64::new(1.0, 0.0);
        swap_bot(&phi, &mut v);
        for (row, x) in v.into_iter().enumerate() {
            m[row * d + col] = x;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{c, canonical_encode, conjugate_circuit, Gate, OracleAidedCircuit};
    use crate::oracle::ClassicalOracle;

    fn bell_key() -> Vec<u8> {
        let circ = OracleAidedCircuit::with_gates(2, vec![Gate::H(0), Gate::Cnot(0, 1)]).with_split(vec![0], vec![1]);
        canonical_encode(&circ)
    }

    fn id_oracle() -> ClassicalOracle {
        ClassicalOracle::from_fn(1, 1, |x| Some(*x))
    }

    #[test]
    fn bot_maps_to_doubled_state() {
        let o = id_oracle();
        let s = KeyedState::key_bot(vec![bell_key()], 3, 0).unwrap();
        let out = qcol_apply(&s, &o);
        let h = 1.0 / 2f64.sqrt();
        assert!((out.block(0)[0] - c(h, 0.0)).norm() < 1e-12);
        assert!((out.block(0)[7] - c(h, 0.0)).norm() < 1e-12);
        assert!(out.block(0)[8].norm() < 1e-12);
    }

    #[test]
    fn invalid_key_is_identity() {
        let o = id_oracle();
        let s = KeyedState::key_bot(vec![vec![0xff, 0xff]], 2, 0).unwrap();
        assert_eq!(qcol_apply(&s, &o), s);
    }

    #[test]
    fn conjugate_key_gives_conjugate_matrix() {
        let o = id_oracle();
        let circ = OracleAidedCircuit::with_gates(2, vec![Gate::H(0), Gate::H(1), Gate::S(1), Gate::T(0)])
            .with_split(vec![0], vec![1]);
        let m = qcol_matrix(&canonical_encode(&circ), 3, &o);
        let mc = qcol_matrix(&canonical_encode(&conjugate_circuit(&circ)), 3, &o);
        assert!(m.iter().zip(&mc).all(|(a, b)| (a.conj() - b).norm() < 1e-12));
        assert!(m.iter().zip(&mc).any(|(a, b)| (a - b).norm() > 1e-3));
    }
}
