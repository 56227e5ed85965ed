//! Exact identities: compressed-oracle equivalence and the QCol involution
//! and conjugation rules.

use rand::Rng;

use super::SlackReport;
use crate::circuit::{canonical_encode, conjugate_circuit, OracleAidedCircuit, OracleStyle};
use crate::cloners::{qcol_apply, qcol_matrix, KeyedState};
use crate::compressed::{average_acceptance, simulate_compressed, ProductDistribution};
use crate::gen::{
    random_distribution, random_oracle_circuit, random_split, random_table_oracle, random_vector, CallShape,
};
use crate::oracle::ClassicalOracle;
use crate::seed::trial_rng;

/// A circuit, a product distribution and the qubit read as acceptance.
#[derive(Clone, Debug)]
pub struct CstoInstance {
    pub circuit: OracleAidedCircuit,
    pub dist: ProductDistribution,
    pub accept: usize,
}

/// Master seed of the fixed corpus.
pub const CSTO_CORPUS_SEED: u64 = 0x0c57_0c0e;

/// Instance `i` of the fixed corpus: at most 3 xor queries over at most 4
/// inputs and 4 outputs.
pub fn csto_instance(i: u64) -> CstoInstance {
    let mut rng = trial_rng(CSTO_CORPUS_SEED, "csto-corpus", i);
    let in_len = rng.gen_range(1..=2);
    let out_len = rng.gen_range(1..=2);
    let nq = in_len + out_len + rng.gen_range(0..=1);
    let calls = rng.gen_range(1..=3);
    let between = rng.gen_range(1..=3);
    let shape = CallShape { style: OracleStyle::Xor, query_len: in_len, response_len: out_len };
    let circuit = random_oracle_circuit(nq, calls, between, shape, &mut rng);
    let rows = (0..1 << in_len).map(|_| random_distribution(out_len, &mut rng)).collect();
    let dist = ProductDistribution::new(in_len, out_len, rows).expect("rows match widths");
    CstoInstance { circuit, dist, accept: rng.gen_range(0..nq) }
}

pub fn csto_corpus(n: usize) -> Vec<CstoInstance> {
    (0..n as u64).map(csto_instance).collect()
}

/// `|Pr_compressed[accept] − E_O Pr[accept]| ≤ 0`, up to tolerance.
pub fn check_csto(inst: &CstoInstance, seed: u64) -> SlackReport {
    let sim = simulate_compressed(&inst.circuit, &inst.dist).expect("corpus circuits are valid");
    let exact = average_acceptance(&inst.circuit, &inst.dist, inst.accept).expect("enumerable");
    SlackReport::le("csto", seed, (sim.prob_one(inst.accept) - exact).abs(), 0.0)
}

/// Keys, payload width, a random keyed state and an oracle.
#[derive(Clone, Debug)]
pub struct QColInstance {
    pub circuits: Vec<OracleAidedCircuit>,
    pub keys: Vec<Vec<u8>>,
    pub payload: usize,
    pub oracle: ClassicalOracle,
    pub state: KeyedState,
}

/// Up to three keys of doubled width at most 3, sometimes with an undecodable
/// key, over a 3-qubit payload.
pub fn random_qcol<R: Rng + ?Sized>(rng: &mut R) -> QColInstance {
    let payload = 3;
    let oracle = random_table_oracle(1, 1, rng);
    let mut circuits = Vec::new();
    let mut keys = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let nq = rng.gen_range(1..=2);
        let c = if nq == 2 {
            let shape = CallShape { style: OracleStyle::Xor, query_len: 1, response_len: 1 };
            random_oracle_circuit(2, rng.gen_range(0..=2), rng.gen_range(1..=3), shape, rng)
        } else {
            random_oracle_circuit(
                1,
                0,
                rng.gen_range(1..=4),
                CallShape { style: OracleStyle::Xor, query_len: 0, response_len: 0 },
                rng,
            )
        };
        let (a, b) = random_split(nq, 1, rng);
        let c = c.with_split(a, b);
        keys.push(canonical_encode(&c));
        circuits.push(c);
    }
    if rng.gen_bool(0.2) {
        keys.push(vec![0xff; rng.gen_range(1..=4)]);
    }
    let dim = keys.len() * ((1 << payload) + 1);
    let amps = random_vector(dim, rng);
    let state = KeyedState::new(keys.clone(), payload, amps).expect("unit vector");
    QColInstance { circuits, keys, payload, oracle, state }
}

/// `‖QCol(QCol σ) − σ‖ ≤ 0`, up to tolerance.
pub fn check_qcol_involution(inst: &QColInstance, seed: u64) -> SlackReport {
    let twice = qcol_apply(&qcol_apply(&inst.state, &inst.oracle), &inst.oracle);
    SlackReport::le("qcol-involution", seed, twice.distance(&inst.state), 0.0)
}

/// `max |(QCol_C)* − QCol_{C*}|` over matrix entries, for every key.
pub fn check_qcol_conjugation(inst: &QColInstance, seed: u64) -> SlackReport {
    let worst = inst
        .circuits
        .iter()
        .map(|c| {
            let m = qcol_matrix(&canonical_encode(c), inst.payload, &inst.oracle);
            let mc = qcol_matrix(&canonical_encode(&conjugate_circuit(c)), inst.payload, &inst.oracle);
            m.iter().zip(&mc).map(|(a, b)| (a.conj() - b).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    SlackReport::le("qcol-conjugate", seed, worst, 0.0)
}
