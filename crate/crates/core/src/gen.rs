//! Seeded random instances for the checkers.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::bits::BitString;
use crate::circuit::{Gate, OracleAidedCircuit, OracleStyle};
use crate::oracle::ClassicalOracle;
use crate::qstate::{BotExtendedState, FiniteDistribution, C64};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random unitary, row-major.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let (q, r) = g.qr().unpack();
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            out[i * dim + j] = q[(i, j)] * phase;
        }
    }
    out
}

/// Random unit vector of the given dimension.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Random pure state; with probability 1/4 only a random subset of basis
/// states is populated, so near-orthogonal pairs also occur.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BotExtendedState {
    let mut v = random_vector(1 << n, rng);
    if rng.gen_bool(0.25) {
        let keep = rng.gen_range(0..1usize << n);
        for (i, z) in v.iter_mut().enumerate() {
            if i != keep && rng.gen_bool(0.5) {
                *z = C64::new(0.0, 0.0);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
    }
    BotExtendedState::from_amplitudes(n, v, false).expect("unit vector")
}

/// Random distribution over `bits`-bit strings with a random support.
pub fn random_distribution<R: Rng + ?Sized>(bits: usize, rng: &mut R) -> FiniteDistribution {
    let sparse = rng.gen_bool(0.5);
    let keep = rng.gen_range(0..1u64 << bits);
    let w: Vec<(BitString, f64)> = BitString::all(bits)
        .map(|x| {
            let on = !sparse || x.value() == keep || rng.gen_bool(0.5);
            let e: f64 = Exp1.sample(rng);
            (x, if on { e } else { 0.0 })
        })
        .collect();
    FiniteDistribution::from_weights(w).expect("positive mass")
}

pub fn random_table_oracle<R: Rng + ?Sized>(in_len: usize, out_len: usize, rng: &mut R) -> ClassicalOracle {
    ClassicalOracle::from_fn(in_len, out_len, |_| Some(BitString::new(rng.gen_range(0..1u64 << out_len), out_len)))
}

fn distinct_qubits<R: Rng + ?Sized>(nq: usize, k: usize, rng: &mut R) -> Vec<usize> {
    rand::seq::index::sample(rng, nq, k).into_vec()
}

/// One non-oracle gate drawn from the whole alphabet.
pub fn random_gate<R: Rng + ?Sized>(nq: usize, rng: &mut R) -> Gate {
    let q = rng.gen_range(0..nq);
    let two = nq >= 2;
    match rng.gen_range(0..if two { 12 } else { 9 }) {
        0 | 1 => Gate::H(q),
        2 => Gate::X(q),
        3 => Gate::Z(q),
        4 => Gate::S(q),
        5 => Gate::Sdg(q),
        6 => Gate::T(q),
        7 => Gate::Tdg(q),
        8 => Gate::U1(q, haar_unitary(2, rng).try_into().unwrap()),
        k => {
            let ab = distinct_qubits(nq, 2, rng);
            match k {
                9 => Gate::Cnot(ab[0], ab[1]),
                10 => Gate::Cz(ab[0], ab[1]),
                _ => Gate::U2(ab[0], ab[1], haar_unitary(4, rng).try_into().unwrap()),
            }
        }
    }
}

/// Shape of the oracle calls in a generated circuit.
#[derive(Clone, Copy, Debug)]
pub struct CallShape {
    pub style: OracleStyle,
    pub query_len: usize,
    pub response_len: usize,
}

/// One-bit query, one-bit response, xor style.
pub const XOR_1_1: CallShape = CallShape { style: OracleStyle::Xor, query_len: 1, response_len: 1 };

/// `calls` oracle calls, each preceded by `gates_between` random gates, then
/// a final layer of random gates. Query and response qubits are redrawn for
/// every call.
pub fn random_oracle_circuit<R: Rng + ?Sized>(
    nq: usize,
    calls: usize,
    gates_between: usize,
    shape: CallShape,
    rng: &mut R,
) -> OracleAidedCircuit {
    assert!(shape.query_len + shape.response_len <= nq);
    let mut c = OracleAidedCircuit::new(nq);
    for _ in 0..calls {
        for _ in 0..gates_between {
            c.push(random_gate(nq, rng));
        }
        let qs = distinct_qubits(nq, shape.query_len + shape.response_len, rng);
        c.push(Gate::Oracle {
            style: shape.style,
            query: qs[..shape.query_len].to_vec(),
            response: qs[shape.query_len..].to_vec(),
        });
    }
    for _ in 0..gates_between {
        c.push(random_gate(nq, rng));
    }
    c
}

/// Random split of `0..nq` into A and B.
pub fn random_split<R: Rng + ?Sized>(nq: usize, max_b: usize, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    let nb = rng.gen_range(0..=max_b.min(nq));
    let mut order = distinct_qubits(nq, nq, rng);
    let b: Vec<usize> = order.drain(..nb).collect();
    (order, b)
}

/// A random measurement-interleaved program: each segment applies gates
/// to qubits not yet measured, may end in a phase call, then measures a
/// random subset of the remaining qubits.
pub fn random_q_circuit<R: Rng + ?Sized>(
    nq: usize,
    segments: usize,
    query_len: usize,
    rng: &mut R,
) -> OracleAidedCircuit {
    let mut c = OracleAidedCircuit::new(nq);
    let mut free: Vec<usize> = (0..nq).collect();
    for s in 0..segments {
        if !free.is_empty() {
            for _ in 0..rng.gen_range(1..=3) {
                c.push(remap(&random_gate(free.len(), rng), &free));
            }
        }
        if rng.gen_bool(0.8) {
            c.push(Gate::Oracle {
                style: OracleStyle::Phase,
                query: distinct_qubits(nq, query_len, rng),
                response: Vec::new(),
            });
        }
        if s + 1 < segments {
            let m: Vec<usize> = free.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            free.retain(|q| !m.contains(q));
            c.push(Gate::Measure(m));
        }
    }
    c
}

fn remap(g: &Gate, to: &[usize]) -> Gate {
    match g {
        Gate::H(q) => Gate::H(to[*q]),
        Gate::X(q) => Gate::X(to[*q]),
        Gate::Z(q) => Gate::Z(to[*q]),
        Gate::S(q) => Gate::S(to[*q]),
        Gate::Sdg(q) => Gate::Sdg(to[*q]),
        Gate::T(q) => Gate::T(to[*q]),
        Gate::Tdg(q) => Gate::Tdg(to[*q]),
        Gate::Cnot(a, b) => Gate::Cnot(to[*a], to[*b]),
        Gate::Cz(a, b) => Gate::Cz(to[*a], to[*b]),
        Gate::U1(q, m) => Gate::U1(to[*q], *m),
        Gate::U2(a, b, m) => Gate::U2(to[*a], to[*b], *m),
        g => g.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    #[test]
    fn haar_is_unitary() {
        let mut rng = rng_from_seed(3);
        let d = 6;
        let u = haar_unitary(d, &mut rng);
        for i in 0..d {
            for j in 0..d {
                let dot: C64 = (0..d).map(|k| u[k * d + i].conj() * u[k * d + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn generated_circuits_validate() {
        let mut rng = rng_from_seed(4);
        for _ in 0..200 {
            let shape = CallShape { style: OracleStyle::Xor, query_len: 2, response_len: 1 };
            let c = random_oracle_circuit(4, 3, 2, shape, &mut rng);
            assert!(c.validate().is_ok());
            assert_eq!(c.oracle_calls(), 3);
        }
    }

    #[test]
    fn generated_q_programs_are_well_formed() {
        let mut rng = rng_from_seed(5);
        for _ in 0..200 {
            let c = random_q_circuit(3, 3, 2, &mut rng);
            assert!(crate::cloners::segments(&c).is_ok());
        }
    }
}
