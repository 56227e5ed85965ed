//! Breaking a distributional collision-resistant puzzle with one Col query.
//!
//! A sampler is a circuit over registers `puzz`, `ans` and `junk`. Querying
//! Col on it with split `A = puzz`, `B = ans ‖ junk` yields
//! `(puzz, ans, junk, ans′, junk′)`; dropping the junk gives the collision.

use std::collections::BTreeMap;

use rand::Rng;

use crate::bits::BitString;
use crate::circuit::{canonical_encode, simulate, OracleAidedCircuit, SimError};
use crate::cloners::{col_state_of, ColOracle};
use crate::gen::{random_oracle_circuit, XOR_1_1};
use crate::oracle::Oracle;
use crate::qstate::{FiniteDistribution, StateError, PROB_EPS};

#[derive(Clone, Debug, PartialEq)]
pub struct PuzzleSampler {
    pub circuit: OracleAidedCircuit,
    pub puzz: Vec<usize>,
    pub ans: Vec<usize>,
    pub junk: Vec<usize>,
}

/// Output of the extractor, `(puzz, ans, ans′)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Collision {
    pub puzz: BitString,
    pub ans: BitString,
    pub ans2: BitString,
}

impl Collision {
    /// `puzz ‖ ans ‖ ans′` with puzz in the low bits.
    pub fn to_bitstring(&self) -> BitString {
        self.puzz.concat(&self.ans).concat(&self.ans2)
    }
}

impl PuzzleSampler {
    pub fn new(circuit: OracleAidedCircuit, puzz: Vec<usize>, ans: Vec<usize>, junk: Vec<usize>) -> Self {
        let b = ans.iter().chain(&junk).copied().collect();
        let circuit = circuit.with_split(puzz.clone(), b);
        PuzzleSampler { circuit, puzz, ans, junk }
    }

    /// The Col key: the sampler's canonical encoding.
    pub fn key(&self) -> Vec<u8> {
        canonical_encode(&self.circuit)
    }

    fn split_sample(&self, v: &BitString) -> Collision {
        let (a, n, j) = (self.puzz.len(), self.ans.len(), self.junk.len());
        Collision { puzz: v.slice(0, a), ans: v.slice(a, n), ans2: v.slice(a + n + j, n) }
    }
}

/// One Col query on the sampler; `None` if Col answers ⊥.
pub fn dcrpuzz_extract(sampler: &PuzzleSampler, col: &ColOracle<'_>, pad: &BitString) -> Option<Collision> {
    let v = col.answer(&sampler.key(), pad)?;
    Some(sampler.split_sample(&v))
}

/// Exact law of the extractor's output.
pub fn extractor_distribution(sampler: &PuzzleSampler, o: &dyn Oracle) -> Option<FiniteDistribution> {
    let d = col_state_of(&sampler.circuit, sampler.key(), o).distribution()?;
    FiniteDistribution::from_weights(d.iter().map(|(v, &p)| (sampler.split_sample(v).to_bitstring(), p))).ok()
}

#[derive(Debug, thiserror::Error)]
pub enum PuzzleError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// `(puzz, ans) ← Samp`, then `ans′` from `Pr[ans′ | puzz]`, computed from
/// the Born probabilities of the sampler's output.
pub fn ideal_collision_distribution(
    sampler: &PuzzleSampler,
    o: &dyn Oracle,
) -> Result<FiniteDistribution, PuzzleError> {
    let out = simulate(&sampler.circuit, o)?;
    let regs: Vec<usize> = sampler.puzz.iter().chain(&sampler.ans).copied().collect();
    let joint = out.outcome_probabilities(&regs)?;
    let (a, n) = (sampler.puzz.len(), sampler.ans.len());
    let mut by_puzz: BTreeMap<u64, Vec<(u64, f64)>> = BTreeMap::new();
    for (i, &p) in joint.iter().enumerate().filter(|(_, &p)| p > PROB_EPS) {
        let i = i as u64;
        by_puzz.entry(i & ((1 << a) - 1)).or_default().push((i >> a, p));
    }
    let mut pairs = Vec::new();
    for (s, rows) in &by_puzz {
        let ps: f64 = rows.iter().map(|(_, p)| p).sum();
        for &(x, px) in rows {
            for &(y, py) in rows {
                let c =
                    Collision { puzz: BitString::new(*s, a), ans: BitString::new(x, n), ans2: BitString::new(y, n) };
                pairs.push((c.to_bitstring(), px * py / ps));
            }
        }
    }
    Ok(FiniteDistribution::from_weights(pairs)?)
}

/// A sampler over `puzz`, `ans`, `junk` registers of 1 to 3, 1 to 3 and 0 to
/// 2 qubits (at most 6 in all), with up to two xor calls to a 1-bit oracle.
pub fn random_sampler<R: Rng + ?Sized>(rng: &mut R) -> PuzzleSampler {
    let a = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=3);
    let j = rng.gen_range(0..=(6 - a - n).min(2));
    let nq = a + n + j;
    let mut qubits: Vec<usize> = (0..nq).collect();
    rand::seq::SliceRandom::shuffle(qubits.as_mut_slice(), rng);
    let calls = rng.gen_range(0..=2);
    let circuit = random_oracle_circuit(nq, calls, rng.gen_range(1..=nq), XOR_1_1, rng);
    PuzzleSampler::new(circuit, qubits[..a].to_vec(), qubits[a..a + n].to_vec(), qubits[a + n..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::oracle::ClassicalOracle;
    use crate::qstate::statistical_distance;
    use crate::seed::rng_from_seed;

    fn none() -> ClassicalOracle {
        ClassicalOracle::from_fn(1, 1, |_| Some(BitString::zeros(1)))
    }

    fn bell() -> PuzzleSampler {
        PuzzleSampler::new(
            OracleAidedCircuit::with_gates(2, vec![Gate::H(0), Gate::Cnot(0, 1)]),
            vec![0],
            vec![1],
            vec![],
        )
    }

    #[test]
    fn bell_sampler_collides_trivially() {
        let d = extractor_distribution(&bell(), &none()).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.prob(&BitString::new(0b000, 3)) - 0.5).abs() < 1e-12);
        assert!((d.prob(&BitString::new(0b111, 3)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_to_one_gives_fresh_answer_half_the_time() {
        // ans uniform on 2 bits, puzz = ans_0 ⊕ ans_1.
        let c = OracleAidedCircuit::with_gates(3, vec![Gate::H(1), Gate::H(2), Gate::Cnot(1, 0), Gate::Cnot(2, 0)]);
        let s = PuzzleSampler::new(c, vec![0], vec![1, 2], vec![]);
        let d = extractor_distribution(&s, &none()).unwrap();
        let fresh: f64 = d.iter().filter(|(v, _)| v.slice(1, 2) != v.slice(3, 2)).map(|(_, p)| p).sum();
        assert!((fresh - 0.5).abs() < 1e-12);
    }

    #[test]
    fn extractor_matches_ideal_on_random_samplers() {
        let mut rng = rng_from_seed(5);
        for _ in 0..10 {
            let s = random_sampler(&mut rng);
            let e = extractor_distribution(&s, &none()).unwrap();
            let i = ideal_collision_distribution(&s, &none()).unwrap();
            assert!(statistical_distance(&e, &i) < 1e-9);
        }
    }

    #[test]
    fn extract_returns_a_supported_collision() {
        let o = none();
        let col = ColOracle { oracle: &o, master: 3 };
        let c = dcrpuzz_extract(&bell(), &col, &BitString::zeros(4)).unwrap();
        assert_eq!(c.puzz, c.ans);
        assert_eq!(c.ans, c.ans2);
    }
}
