//! Rearranged OW2H-compatibility bounds for the compression unitaries of
//! `DCol^O` and `DQ^O`.
//!
//! The adversary queries the swap unitary whose states are the distribution
//! states `|DCol^O_C⟩` (or `|DQ^O_C⟩`) over a small alphabet of circuits.
//! `B` picks `i ← [q]`, measures the circuit `C` queried at step `i`, picks
//! `j ← [q]` and measures the query register of the `j`-th call of `C`.

use std::collections::BTreeSet;

use rand::Rng;

use super::adversary::AdversaryProgram;
use super::SlackReport;
use crate::bits::BitString;
use crate::circuit::{canonical_encode, simulate_traced, OracleAidedCircuit, OracleStyle};
use crate::cloners::{col_state_of, dq_distribution, q_query_masses};
use crate::gen::{random_oracle_circuit, random_q_circuit, random_split, random_table_oracle, CallShape};
use crate::oracle::{ClassicalOracle, Oracle};
use crate::qstate::{dist_state, FiniteDistribution, C64};

/// Distribution state padded to `2^bits` entries.
fn padded(d: &FiniteDistribution, bits: usize) -> Vec<C64> {
    let s = dist_state(d).expect("normalized law");
    let mut v = vec![C64::new(0.0, 0.0); 1 << bits];
    v[..s.dim()].copy_from_slice(s.amplitudes());
    v
}

/// `ε` and `Pr[B ∈ T]` given the per-circuit states and call masses.
fn epsilon_and_hit(adv: &AdversaryProgram, phis: &[Vec<C64>], phis2: &[Vec<C64>], masses: &[Vec<f64>]) -> (f64, f64) {
    let (eps, b) = adv.delta_and_b(phis, phis2);
    let q = adv.queries() as f64;
    let hit = b.iter().zip(masses).map(|(p, m)| p * m.iter().take(adv.queries()).sum::<f64>() / q).sum();
    (eps, hit)
}

/// A small alphabet of circuits with a shared oracle pair.
#[derive(Clone, Debug)]
pub struct PuncInstance {
    pub adversary: AdversaryProgram,
    pub circuits: Vec<OracleAidedCircuit>,
    pub oracle: ClassicalOracle,
    pub oracle2: ClassicalOracle,
}

impl PuncInstance {
    fn differing(&self) -> BTreeSet<BitString> {
        self.oracle.differing_set(&self.oracle2)
    }
}

fn modified<R: Rng + ?Sized>(o: &ClassicalOracle, in_len: usize, out_len: usize, rng: &mut R) -> ClassicalOracle {
    let p = rng.gen_range(0.1..0.6);
    let flips: Vec<bool> = (0..1 << in_len).map(|_| rng.gen_bool(p)).collect();
    ClassicalOracle::from_fn(in_len, out_len, |x| {
        let y = o.query(x)?;
        Some(if flips[x.value() as usize] { BitString::new(y.value() ^ 1, out_len) } else { y })
    })
}

/// `ε ≤ 4√6·q^{5/4}·Pr[B ∈ T]^{1/4}` for `DCol`.
pub fn check_ccol_punc(inst: &PuncInstance, seed: u64) -> Option<SlackReport> {
    let diff = inst.differing();
    let mut states = Vec::new();
    let mut masses = Vec::new();
    for c in &inst.circuits {
        let key = canonical_encode(c);
        let d1 = col_state_of(c, key.clone(), &inst.oracle).distribution()?;
        let d2 = col_state_of(c, key, &inst.oracle2).distribution()?;
        let (_, trace) = simulate_traced(c, &inst.oracle).ok()?;
        masses.push(trace.marginals.iter().map(|m| diff.iter().map(|x| m.prob(x)).sum()).collect());
        states.push((d1, d2));
    }
    let bits = states.iter().map(|(d, _)| d.support().next().map_or(0, |x| x.len())).max()?;
    let phis: Vec<Vec<C64>> = states.iter().map(|(d, _)| padded(d, bits)).collect();
    let phis2: Vec<Vec<C64>> = states.iter().map(|(_, d)| padded(d, bits)).collect();
    let (eps, hit) = epsilon_and_hit(&inst.adversary, &phis, &phis2, &masses);
    let q = inst.adversary.queries() as f64;
    Some(SlackReport::le("ccol-punc", seed, eps, 4.0 * 6f64.sqrt() * q.powf(1.25) * hit.powf(0.25)))
}

/// `ε ≤ √(4/3)·q²·Pr[B ∈ T]^{1/4}` for `DQ`.
pub fn check_pdqp_punc(inst: &PuncInstance, seed: u64) -> Option<SlackReport> {
    let diff = inst.differing();
    let mut states = Vec::new();
    let mut masses = Vec::new();
    for c in &inst.circuits {
        states.push((dq_distribution(c, &inst.oracle).ok()?, dq_distribution(c, &inst.oracle2).ok()?));
        masses.push(q_query_masses(c, &inst.oracle, &diff).ok()?);
    }
    let bits = states.iter().map(|(d, _)| d.support().next().map_or(0, |x| x.len())).max()?;
    let phis: Vec<Vec<C64>> = states.iter().map(|(d, _)| padded(d, bits)).collect();
    let phis2: Vec<Vec<C64>> = states.iter().map(|(_, d)| padded(d, bits)).collect();
    let (eps, hit) = epsilon_and_hit(&inst.adversary, &phis, &phis2, &masses);
    let q = inst.adversary.queries() as f64;
    Some(SlackReport::le("pdqp-punc", seed, eps, (4.0f64 / 3.0).sqrt() * q * q * hit.powf(0.25)))
}

/// Two or four Col keys with at most `q` xor calls each.
pub fn random_ccol<R: Rng + ?Sized>(rng: &mut R) -> PuncInstance {
    let q = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=2);
    let qlen = rng.gen_range(1..=2);
    let circuits: Vec<OracleAidedCircuit> = (0..1 << k)
        .map(|_| {
            let nq = 3;
            let shape = CallShape { style: OracleStyle::Xor, query_len: qlen, response_len: 1 };
            let (a, b) = random_split(nq, 1, rng);
            random_oracle_circuit(nq, rng.gen_range(1..=q), 1, shape, rng).with_split(a, b)
        })
        .collect();
    let oracle = random_table_oracle(qlen, 1, rng);
    let oracle2 = modified(&oracle, qlen, 1, rng);
    let width = circuits.iter().map(|c| c.split.a.len() + 2 * c.split.b.len()).max().unwrap();
    let adversary = AdversaryProgram::random(q, k, 1 << width, 0, rng);
    PuncInstance { adversary, circuits, oracle, oracle2 }
}

/// Two measurement-interleaved programs over 2 qubits and a phase oracle.
pub fn random_pdqp<R: Rng + ?Sized>(rng: &mut R) -> PuncInstance {
    let q = rng.gen_range(1..=3);
    let qlen = rng.gen_range(1..=2);
    let circuits: Vec<OracleAidedCircuit> =
        (0..2).map(|_| random_q_circuit(2, rng.gen_range(1..=q.min(2)), qlen, rng)).collect();
    let oracle = random_table_oracle(qlen, 1, rng);
    let oracle2 = modified(&oracle, qlen, 1, rng);
    let bits = circuits.iter().map(|c| 2 * crate::cloners::segments(c).map(|s| s.len()).unwrap_or(1)).max().unwrap();
    let adversary = AdversaryProgram::random(q, 1, 1 << bits, 0, rng);
    PuncInstance { adversary, circuits, oracle, oracle2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    #[test]
    fn random_ccol_instances_pass() {
        let mut rng = rng_from_seed(12);
        for i in 0..20 {
            let inst = random_ccol(&mut rng);
            let r = check_ccol_punc(&inst, i).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn random_pdqp_instances_pass() {
        let mut rng = rng_from_seed(13);
        for i in 0..20 {
            let inst = random_pdqp(&mut rng);
            let r = check_pdqp_punc(&inst, i).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn equal_oracles_give_zero_epsilon() {
        let mut rng = rng_from_seed(14);
        let mut inst = random_ccol(&mut rng);
        inst.oracle2 = inst.oracle.clone();
        let r = check_ccol_punc(&inst, 0).unwrap();
        assert!(r.lhs < 1e-12 && r.pass);
    }
}
