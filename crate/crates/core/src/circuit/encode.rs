//! Canonical byte encoding.
//!
//! Layout: `b"QC"`, version byte, qubit count (u8), gate count (u16 LE), the
//! gates, then the split as two length-prefixed index lists. Each gate is an
//! opcode followed by its operands; index lists are a u8 length followed by
//! u8 indices; literals are little-endian f64 pairs `(re, im)` in row-major
//! order. Decoding rejects anything `canonical_encode` would not produce.

use thiserror::Error;

use super::{c, CircuitError, Gate, OracleAidedCircuit, OracleStyle, OutputSplit};
use crate::qstate::C64;

const MAGIC: &[u8; 2] = b"QC";
const VERSION: u8 = 1;

const OP_H: u8 = 0x01;
const OP_X: u8 = 0x02;
const OP_Z: u8 = 0x03;
const OP_S: u8 = 0x04;
const OP_SDG: u8 = 0x05;
const OP_T: u8 = 0x06;
const OP_TDG: u8 = 0x07;
const OP_CNOT: u8 = 0x10;
const OP_CZ: u8 = 0x11;
const OP_U1: u8 = 0x20;
const OP_U2: u8 = 0x21;
const OP_ORACLE: u8 = 0x30;
const OP_MEASURE: u8 = 0x40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("bad header")]
    Header,
    #[error("truncated input")]
    Truncated,
    #[error("unknown opcode {0:#04x}")]
    Opcode(u8),
    #[error("non-canonical number")]
    NonCanonicalNumber,
    #[error("trailing bytes")]
    Trailing,
    #[error("invalid circuit: {0}")]
    Invalid(#[from] CircuitError),
}

fn put_list(out: &mut Vec<u8>, qs: &[usize]) {
    out.push(qs.len() as u8);
    out.extend(qs.iter().map(|&q| q as u8));
}

fn put_complex(out: &mut Vec<u8>, z: &C64) {
    // Adding +0.0 folds -0.0 into +0.0.
    out.extend_from_slice(&(z.re + 0.0).to_le_bytes());
    out.extend_from_slice(&(z.im + 0.0).to_le_bytes());
}

/// Encoding of a circuit. Only meaningful for circuits that pass
/// [`OracleAidedCircuit::validate`].
pub fn canonical_encode(circ: &OracleAidedCircuit) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 3 * circ.gates.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(circ.num_qubits as u8);
    out.extend_from_slice(&(circ.gates.len() as u16).to_le_bytes());
    for g in &circ.gates {
        match g {
            Gate::H(q) => out.extend([OP_H, *q as u8]),
            Gate::X(q) => out.extend([OP_X, *q as u8]),
            Gate::Z(q) => out.extend([OP_Z, *q as u8]),
            Gate::S(q) => out.extend([OP_S, *q as u8]),
            Gate::Sdg(q) => out.extend([OP_SDG, *q as u8]),
            Gate::T(q) => out.extend([OP_T, *q as u8]),
            Gate::Tdg(q) => out.extend([OP_TDG, *q as u8]),
            Gate::Cnot(a, b) => out.extend([OP_CNOT, *a as u8, *b as u8]),
            Gate::Cz(a, b) => out.extend([OP_CZ, *a as u8, *b as u8]),
            Gate::U1(q, m) => {
                out.extend([OP_U1, *q as u8]);
                m.iter().for_each(|z| put_complex(&mut out, z));
            }
            Gate::U2(a, b, m) => {
                out.extend([OP_U2, *a as u8, *b as u8]);
                m.iter().for_each(|z| put_complex(&mut out, z));
            }
            Gate::Oracle { style, query, response } => {
                out.push(OP_ORACLE);
                out.push(match style {
                    OracleStyle::Xor => 0,
                    OracleStyle::Phase => 1,
                });
                put_list(&mut out, query);
                put_list(&mut out, response);
            }
            Gate::Measure(qs) => {
                out.push(OP_MEASURE);
                put_list(&mut out, qs);
            }
        }
    }
    put_list(&mut out, &circ.split.a);
    put_list(&mut out, &circ.split.b);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        let end = self.pos.checked_add(n).ok_or(DecodeError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(DecodeError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    fn idx(&mut self) -> Result<usize, DecodeError> {
        Ok(self.u8()? as usize)
    }

    fn list(&mut self) -> Result<Vec<usize>, DecodeError> {
        let n = self.u8()? as usize;
        Ok(self.take(n)?.iter().map(|&b| b as usize).collect())
    }

    fn f64(&mut self) -> Result<f64, DecodeError> {
        let bytes: [u8; 8] = self.take(8)?.try_into().unwrap();
        let v = f64::from_le_bytes(bytes);
        if !v.is_finite() || (v == 0.0 && v.is_sign_negative()) {
            return Err(DecodeError::NonCanonicalNumber);
        }
        Ok(v)
    }

    fn complex(&mut self) -> Result<C64, DecodeError> {
        let re = self.f64()?;
        let im = self.f64()?;
        Ok(c(re, im))
    }
}

/// Parses canonical bytes. Never panics; any malformed input is an error.
pub fn canonical_decode(bytes: &[u8]) -> Result<OracleAidedCircuit, DecodeError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(2).map_err(|_| DecodeError::Header)? != MAGIC || r.u8().map_err(|_| DecodeError::Header)? != VERSION {
        return Err(DecodeError::Header);
    }
    let num_qubits = r.idx()?;
    let count = u16::from_le_bytes(r.take(2)?.try_into().unwrap()) as usize;
    let mut gates = Vec::with_capacity(count.min(bytes.len()));
    for _ in 0..count {
        let op = r.u8()?;
        let g = match op {
            OP_H => Gate::H(r.idx()?),
            OP_X => Gate::X(r.idx()?),
            OP_Z => Gate::Z(r.idx()?),
            OP_S => Gate::S(r.idx()?),
            OP_SDG => Gate::Sdg(r.idx()?),
            OP_T => Gate::T(r.idx()?),
            OP_TDG => Gate::Tdg(r.idx()?),
            OP_CNOT => Gate::Cnot(r.idx()?, r.idx()?),
            OP_CZ => Gate::Cz(r.idx()?, r.idx()?),
            OP_U1 => {
                let q = r.idx()?;
                let mut m = [c(0.0, 0.0); 4];
                for z in &mut m {
                    *z = r.complex()?;
                }
                Gate::U1(q, m)
            }
            OP_U2 => {
                let a = r.idx()?;
                let b = r.idx()?;
                let mut m = [c(0.0, 0.0); 16];
                for z in &mut m {
                    *z = r.complex()?;
                }
                Gate::U2(a, b, m)
            }
            OP_ORACLE => {
                let style = match r.u8()? {
                    0 => OracleStyle::Xor,
                    1 => OracleStyle::Phase,
                    other => return Err(DecodeError::Opcode(other)),
                };
                Gate::Oracle { style, query: r.list()?, response: r.list()? }
            }
            OP_MEASURE => Gate::Measure(r.list()?),
            other => return Err(DecodeError::Opcode(other)),
        };
        gates.push(g);
    }
    let split = OutputSplit { a: r.list()?, b: r.list()? };
    if r.pos != bytes.len() {
        return Err(DecodeError::Trailing);
    }
    let circ = OracleAidedCircuit { num_qubits, gates, split };
    circ.validate()?;
    Ok(circ)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn malformed_header_is_invalid() {
        assert_eq!(canonical_decode(&[0xFF, 0xFF, 0xFF, 0xFF]), Err(DecodeError::Header));
        assert_eq!(canonical_decode(&[]), Err(DecodeError::Header));
        assert_eq!(canonical_decode(b"QC"), Err(DecodeError::Header));
    }

    #[test]
    fn truncation_and_trailing_bytes_are_invalid() {
        let mut circ = OracleAidedCircuit::new(2);
        circ.push(Gate::H(0)).push(Gate::Cnot(0, 1));
        let bytes = canonical_encode(&circ);
        for cut in 0..bytes.len() {
            assert!(canonical_decode(&bytes[..cut]).is_err(), "cut {cut}");
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert_eq!(canonical_decode(&extra), Err(DecodeError::Trailing));
        assert_eq!(canonical_decode(&bytes).unwrap(), circ);
    }

    #[test]
    fn negative_zero_is_folded() {
        let z = c(-0.0, 0.0);
        let o = c(1.0, -0.0);
        let circ = OracleAidedCircuit::with_gates(1, vec![Gate::U1(0, [o, z, z, o])]);
        let bytes = canonical_encode(&circ);
        let back = canonical_decode(&bytes).unwrap();
        assert_eq!(canonical_encode(&back), bytes);
    }

    /// All circuits with at most two named gates on two qubits.
    fn small_circuits() -> Vec<OracleAidedCircuit> {
        let mut singles = Vec::new();
        for q in 0..2 {
            singles.extend([Gate::H(q), Gate::X(q), Gate::Z(q), Gate::S(q), Gate::Sdg(q), Gate::T(q), Gate::Tdg(q)]);
        }
        singles.extend([Gate::Cnot(0, 1), Gate::Cnot(1, 0), Gate::Cz(0, 1), Gate::Cz(1, 0)]);
        singles.push(Gate::Oracle { style: OracleStyle::Xor, query: vec![0], response: vec![1] });
        singles.push(Gate::Oracle { style: OracleStyle::Phase, query: vec![0, 1], response: vec![] });
        let mut out = vec![OracleAidedCircuit::new(2)];
        for g in &singles {
            out.push(OracleAidedCircuit::with_gates(2, vec![g.clone()]));
            for h in &singles {
                out.push(OracleAidedCircuit::with_gates(2, vec![g.clone(), h.clone()]));
            }
        }
        let splits = [(vec![0, 1], vec![]), (vec![0], vec![1]), (vec![1], vec![0]), (vec![], vec![0, 1])];
        out.iter()
            .flat_map(|circ| splits.iter().map(move |(a, b)| circ.clone().with_split(a.clone(), b.clone())))
            .collect()
    }

    #[test]
    fn encoding_is_injective_on_small_circuits() {
        let circuits = small_circuits();
        let mut seen = HashSet::new();
        for circ in &circuits {
            let bytes = canonical_encode(circ);
            assert!(seen.insert(bytes.clone()), "collision at {circ:?}");
            assert_eq!(&canonical_decode(&bytes).unwrap(), circ);
        }
        assert_eq!(seen.len(), circuits.len());
    }
}
