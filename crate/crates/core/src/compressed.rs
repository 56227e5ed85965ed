//! Compression unitaries and the compressed-oracle simulation.
//!
//! The database is purified: each queried input `x` owns a local register
//! spanned by `|⊥⟩` and the support of `D_x`. A basis configuration lists the
//! non-⊥ entries only, so inputs that were never touched cost nothing.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::circuit::{CircuitError, Gate, OracleAidedCircuit, OracleStyle};
use crate::oracle::ClassicalOracle;
use crate::qstate::{gather, scatter, FiniteDistribution, StateError, C64, MAX_QUBITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompressedError {
    #[error("row {0} has outputs of the wrong width")]
    RowWidth(usize),
    #[error("expected {expected} rows, got {got}")]
    RowCount { expected: usize, got: usize },
    #[error("query register has {got} qubits, distribution inputs have {expected} bits")]
    QueryWidth { expected: usize, got: usize },
    #[error("response register has {got} qubits, distribution outputs have {expected} bits")]
    ResponseWidth { expected: usize, got: usize },
    #[error("phase queries are not supported by the compressed simulation")]
    PhaseQuery,
    #[error("measurement gate in a unitary simulation")]
    Measurement,
    #[error("domain of 2^{0} inputs too large")]
    DomainTooLarge(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// One finite output distribution per input of a fixed width.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductDistribution {
    in_len: usize,
    out_len: usize,
    rows: Vec<FiniteDistribution>,
}

pub const MAX_DOMAIN_BITS: usize = 16;

impl ProductDistribution {
    pub fn new(in_len: usize, out_len: usize, rows: Vec<FiniteDistribution>) -> Result<Self, CompressedError> {
        if in_len > MAX_DOMAIN_BITS {
            return Err(CompressedError::DomainTooLarge(in_len));
        }
        if rows.len() != 1 << in_len {
            return Err(CompressedError::RowCount { expected: 1 << in_len, got: rows.len() });
        }
        for (x, row) in rows.iter().enumerate() {
            if row.iter().any(|(y, _)| y.len() != out_len) {
                return Err(CompressedError::RowWidth(x));
            }
        }
        Ok(ProductDistribution { in_len, out_len, rows })
    }

    pub fn from_fn<F: Fn(&BitString) -> FiniteDistribution>(
        in_len: usize,
        out_len: usize,
        f: F,
    ) -> Result<Self, CompressedError> {
        if in_len > MAX_DOMAIN_BITS {
            return Err(CompressedError::DomainTooLarge(in_len));
        }
        Self::new(in_len, out_len, BitString::all(in_len).map(|x| f(&x)).collect())
    }

    pub fn uniform(in_len: usize, out_len: usize) -> Self {
        Self::from_fn(in_len, out_len, |_| FiniteDistribution::uniform(out_len)).unwrap()
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn row(&self, x: &BitString) -> Option<&FiniteDistribution> {
        (x.len() == self.in_len).then(|| &self.rows[x.value() as usize])
    }

    pub fn rows(&self) -> &[FiniteDistribution] {
        &self.rows
    }

    /// `|D_x⟩` over the full output alphabet.
    pub fn row_state(&self, x: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); 1 << self.out_len];
        for (y, &p) in self.rows[x].iter() {
            v[y.value() as usize] = C64::new(p.sqrt(), 0.0);
        }
        v
    }

    /// Every oracle in the support with its probability.
    pub fn enumerate_oracles(&self) -> Vec<(ClassicalOracle, f64)> {
        let supports: Vec<Vec<(BitString, f64)>> =
            self.rows.iter().map(|r| r.iter().filter(|(_, &p)| p > 0.0).map(|(y, &p)| (*y, p)).collect()).collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; supports.len()];
        loop {
            let weight: f64 = choice.iter().zip(&supports).map(|(&k, s)| s[k].1).product();
            let rows = choice.iter().zip(&supports).map(|(&k, s)| Some(s[k].0)).collect();
            out.push((ClassicalOracle::from_rows(self.in_len, self.out_len, rows), weight));
            let mut pos = 0;
            loop {
                if pos == choice.len() {
                    return out;
                }
                choice[pos] += 1;
                if choice[pos] < supports[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// Independent per-row samples into a table oracle.
pub fn oracle_from_distribution<R: Rng + ?Sized>(d: &ProductDistribution, rng: &mut R) -> ClassicalOracle {
    let rows = d.rows.iter().map(|r| Some(r.sample(rng))).collect();
    ClassicalOracle::from_rows(d.in_len, d.out_len, rows)
}

/// The involution `|⊥⟩ ↔ |φ⟩`, identity on the complement, applied in place.
/// `v` has one more entry than `phi`; the last entry is ⊥. `phi` must be a
/// unit vector (the zero vector gives the identity).
pub fn swap_bot(phi: &[C64], v: &mut [C64]) {
    assert_eq!(v.len(), phi.len() + 1);
    let bot = phi.len();
    if phi.iter().all(|p| p.norm_sqr() == 0.0) {
        return;
    }
    // U = I − w w† with w = |⊥⟩ − |φ⟩.
    let dot = v[bot] - phi.iter().zip(v.iter()).map(|(p, x)| p.conj() * x).sum::<C64>();
    v[bot] -= dot;
    for (x, p) in v.iter_mut().zip(phi) {
        *x += p * dot;
    }
}

/// `U_x` on a local register spanned by the support of `D_x` (in outcome
/// order) followed by ⊥.
pub fn compression_apply(d: &ProductDistribution, x: &BitString, local: &[C64]) -> Vec<C64> {
    let row = d.row(x).expect("input in domain");
    let phi: Vec<C64> = row.iter().filter(|(_, &p)| p > 0.0).map(|(_, &p)| C64::new(p.sqrt(), 0.0)).collect();
    let mut v = local.to_vec();
    swap_bot(&phi, &mut v);
    v
}

/// Non-⊥ database entries `(x, support index)`, sorted by `x`.
pub type Database = Vec<(u32, u32)>;

const PRUNE: f64 = 1e-14;

/// Querier state jointly with the purified database.
#[derive(Clone, Debug)]
pub struct CompressedSim {
    num_qubits: usize,
    supports: Vec<Vec<(BitString, f64)>>,
    in_len: usize,
    out_len: usize,
    amps: BTreeMap<(usize, Database), C64>,
}

fn lookup(db: &Database, x: u32) -> Option<u32> {
    db.binary_search_by_key(&x, |e| e.0).ok().map(|i| db[i].1)
}

fn with_entry(db: &Database, x: u32, k: Option<u32>) -> Database {
    let mut out: Database = db.iter().copied().filter(|e| e.0 != x).collect();
    if let Some(k) = k {
        let pos = out.partition_point(|e| e.0 < x);
        out.insert(pos, (x, k));
    }
    out
}

impl CompressedSim {
    pub fn new(num_qubits: usize, d: &ProductDistribution) -> Result<Self, CompressedError> {
        if num_qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits(num_qubits).into());
        }
        let supports =
            d.rows.iter().map(|r| r.iter().filter(|(_, &p)| p > 0.0).map(|(y, &p)| (*y, p)).collect()).collect();
        let mut amps = BTreeMap::new();
        amps.insert((0, Vec::new()), C64::new(1.0, 0.0));
        Ok(CompressedSim { num_qubits, supports, in_len: d.in_len, out_len: d.out_len, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Nonzero basis components of the joint state.
    pub fn components(&self) -> impl Iterator<Item = (&(usize, Database), &C64)> {
        self.amps.iter()
    }

    pub fn norm(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn add(map: &mut BTreeMap<(usize, Database), C64>, key: (usize, Database), a: C64) {
        *map.entry(key).or_insert(C64::new(0.0, 0.0)) += a;
    }

    fn prune(map: BTreeMap<(usize, Database), C64>) -> BTreeMap<(usize, Database), C64> {
        map.into_iter().filter(|(_, a)| a.norm() > PRUNE).collect()
    }

    fn apply_local(&mut self, qubits: &[usize], m: &[C64]) {
        let d = 1usize << qubits.len();
        let mut next = BTreeMap::new();
        for ((i, db), a) in &self.amps {
            let col = gather(*i, qubits);
            let base = i & !scatter(d - 1, qubits);
            for row in 0..d {
                let coeff = m[row * d + col];
                if coeff.norm() > 0.0 {
                    Self::add(&mut next, (base | scatter(row, qubits), db.clone()), coeff * a);
                }
            }
        }
        self.amps = Self::prune(next);
    }

    /// Applies `U_x` on the local register of the `x` named by each component.
    fn compress_all(&mut self, query: &[usize]) {
        let mut next = BTreeMap::new();
        for ((i, db), a) in &self.amps {
            let x = gather(*i, query) as u32;
            let supp = &self.supports[x as usize];
            match lookup(db, x) {
                None => {
                    for (k, (_, p)) in supp.iter().enumerate() {
                        Self::add(&mut next, (*i, with_entry(db, x, Some(k as u32))), a * p.sqrt());
                    }
                }
                Some(k) => {
                    let pk = supp[k as usize].1.sqrt();
                    Self::add(&mut next, (*i, db.clone()), *a);
                    Self::add(&mut next, (*i, with_entry(db, x, None)), a * pk);
                    for (j, (_, p)) in supp.iter().enumerate() {
                        Self::add(&mut next, (*i, with_entry(db, x, Some(j as u32))), -a * pk * p.sqrt());
                    }
                }
            }
        }
        self.amps = Self::prune(next);
    }

    /// One query `Σ_x |x⟩⟨x| ⊗ (U_x ∘ CNOT_{D_x Y} ∘ U_x)`. A ⊥ local register
    /// leaves Y unchanged.
    pub fn csto_query(&mut self, query: &[usize], response: &[usize]) -> Result<(), CompressedError> {
        if query.len() != self.in_len {
            return Err(CompressedError::QueryWidth { expected: self.in_len, got: query.len() });
        }
        if response.len() != self.out_len {
            return Err(CompressedError::ResponseWidth { expected: self.out_len, got: response.len() });
        }
        self.compress_all(query);
        let mut next = BTreeMap::new();
        for ((i, db), a) in std::mem::take(&mut self.amps) {
            let x = gather(i, query) as u32;
            let j = match lookup(&db, x) {
                Some(k) => i ^ scatter(self.supports[x as usize][k as usize].0.value() as usize, response),
                None => i,
            };
            Self::add(&mut next, (j, db), a);
        }
        self.amps = next;
        self.compress_all(query);
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), CompressedError> {
        match g {
            Gate::Oracle { style: OracleStyle::Xor, query, response } => self.csto_query(query, response),
            Gate::Oracle { style: OracleStyle::Phase, .. } => Err(CompressedError::PhaseQuery),
            Gate::Measure(_) => Err(CompressedError::Measurement),
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::U2(a, b, _) => {
                self.apply_local(&[*b, *a], &g.matrix_2q().unwrap());
                Ok(())
            }
            _ => {
                self.apply_local(&[g.qubits()[0]], &g.matrix_1q().unwrap());
                Ok(())
            }
        }
    }

    /// Probability that querier qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        self.amps.iter().filter(|((i, _), _)| (i >> q) & 1 == 1).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Marginal law of the querier qubits `targets`.
    pub fn querier_distribution(&self, targets: &[usize]) -> Result<FiniteDistribution, StateError> {
        FiniteDistribution::from_weights(
            self.amps
                .iter()
                .map(|((i, _), a)| (BitString::new(gather(*i, targets) as u64, targets.len()), a.norm_sqr())),
        )
    }
}

/// Runs `c` with every xor query answered by the compressed oracle for `d`.
pub fn simulate_compressed(c: &OracleAidedCircuit, d: &ProductDistribution) -> Result<CompressedSim, CompressedError> {
    c.validate()?;
    let mut sim = CompressedSim::new(c.num_qubits, d)?;
    for g in &c.gates {
        sim.apply_gate(g)?;
    }
    Ok(sim)
}

/// `E_{O←D} Pr[qubit q of C^O|0⟩ reads 1]` by enumerating every oracle in
/// the support.
pub fn average_acceptance(c: &OracleAidedCircuit, d: &ProductDistribution, q: usize) -> Result<f64, CompressedError> {
    let mut total = 0.0;
    for (o, w) in d.enumerate_oracles() {
        let out = crate::circuit::simulate(c, &o).map_err(|e| match e {
            crate::circuit::SimError::Invalid(ci) => CompressedError::Circuit(ci),
            crate::circuit::SimError::State(s) => CompressedError::State(s),
            _ => CompressedError::ResponseWidth { expected: d.out_len, got: 0 },
        })?;
        let p1: f64 = out.probabilities().iter().enumerate().filter(|(i, _)| (i >> q) & 1 == 1).map(|(_, p)| p).sum();
        total += w * p1;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::TOL;
    use crate::seed::rng_from_seed;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn compression_of_bot_under_uniform_row_is_plus() {
        let d = ProductDistribution::uniform(1, 1);
        let out = compression_apply(&d, &BitString::new(0, 1), &[c(0.0), c(0.0), c(1.0)]);
        assert!((out[0] - c(FRAC_1_SQRT_2)).norm() < TOL);
        assert!((out[1] - c(FRAC_1_SQRT_2)).norm() < TOL);
        assert!(out[2].norm() < TOL);
    }

    #[test]
    fn compression_fixes_the_orthogonal_complement() {
        let d = ProductDistribution::uniform(1, 1);
        let minus = [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2), c(0.0)];
        let out = compression_apply(&d, &BitString::new(1, 1), &minus);
        for (a, b) in out.iter().zip(&minus) {
            assert!((a - b).norm() < TOL);
        }
    }

    #[test]
    fn zero_vector_swap_is_identity() {
        let mut v = [c(0.3), C64::new(0.0, 0.4), c(0.2)];
        let before = v;
        swap_bot(&[c(0.0), c(0.0)], &mut v);
        assert_eq!(v, before);
    }

    #[test]
    fn first_query_entangles_response_with_database() {
        // X = |1⟩ on qubit 0, Y on qubit 1, D_1 uniform over {0,1}.
        let d = ProductDistribution::uniform(1, 1);
        let mut circ = OracleAidedCircuit::new(2);
        circ.push(Gate::X(0));
        circ.push(Gate::Oracle { style: OracleStyle::Xor, query: vec![0], response: vec![1] });
        let sim = simulate_compressed(&circ, &d).unwrap();
        let comps: Vec<_> = sim.components().collect();
        assert!((sim.norm() - 1.0).abs() < TOL);
        // Y = y with amplitude 1/√2, database holds the compressed form of |y⟩.
        let y_marginal = sim.querier_distribution(&[1]).unwrap();
        assert!((y_marginal.prob(&BitString::new(0, 1)) - 0.5).abs() < TOL);
        assert!((y_marginal.prob(&BitString::new(1, 1)) - 0.5).abs() < TOL);
        // Y = 0 pairs with U|0⟩ = |0⟩ + (|⊥⟩ − |D⟩)/√2, which has a ⊥ part.
        assert!(comps.iter().any(|((i, db), _)| *i == 1 && db.is_empty()));
        assert!(comps.iter().all(|((i, _), _)| i & 1 == 1));
    }

    #[test]
    fn untouched_inputs_stay_bot() {
        let d = ProductDistribution::uniform(1, 1);
        let mut circ = OracleAidedCircuit::new(2);
        circ.push(Gate::Oracle { style: OracleStyle::Xor, query: vec![0], response: vec![1] });
        let sim = simulate_compressed(&circ, &d).unwrap();
        assert!(sim.components().all(|((_, db), _)| db.iter().all(|e| e.0 == 0)));
    }

    #[test]
    fn repeated_classical_query_is_consistent() {
        // Two queries on the same x into separate responses: equal answers w.p. 1.
        let d = ProductDistribution::uniform(1, 1);
        let mut circ = OracleAidedCircuit::new(3);
        circ.push(Gate::X(0));
        circ.push(Gate::Oracle { style: OracleStyle::Xor, query: vec![0], response: vec![1] });
        circ.push(Gate::Oracle { style: OracleStyle::Xor, query: vec![0], response: vec![2] });
        let sim = simulate_compressed(&circ, &d).unwrap();
        let joint = sim.querier_distribution(&[1, 2]).unwrap();
        assert!((joint.prob(&"00".parse().unwrap()) - 0.5).abs() < TOL);
        assert!((joint.prob(&"11".parse().unwrap()) - 0.5).abs() < TOL);
    }

    #[test]
    fn enumeration_weights_sum_to_one() {
        let d = ProductDistribution::from_fn(2, 2, |x| {
            FiniteDistribution::from_weights(BitString::all(2).map(|y| (y, (1 + y.value() + x.value()) as f64)))
                .unwrap()
        })
        .unwrap();
        let all = d.enumerate_oracles();
        assert_eq!(all.len(), 256);
        assert!((all.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() < TOL);
    }

    #[test]
    fn point_mass_rows_give_deterministic_oracle() {
        let d = ProductDistribution::from_fn(2, 2, |x| FiniteDistribution::point(BitString::new(x.value() ^ 1, 2)))
            .unwrap();
        let mut rng = rng_from_seed(1);
        let a = oracle_from_distribution(&d, &mut rng);
        let b = oracle_from_distribution(&d, &mut rng);
        assert!(a.differing_set(&b).is_empty());
    }

    #[test]
    fn uniform_rows_are_uniform_and_independent() {
        let d = ProductDistribution::uniform(2, 1);
        let mut rng = rng_from_seed(2);
        let n = 10_000;
        let mut ones = [0usize; 4];
        let mut both = 0usize;
        for _ in 0..n {
            let o = oracle_from_distribution(&d, &mut rng);
            let bits: Vec<bool> = BitString::all(2).map(|x| o.query_bit(&x)).collect();
            for (k, b) in bits.iter().enumerate() {
                ones[k] += *b as usize;
            }
            both += (bits[0] && bits[1]) as usize;
        }
        let sigma = (0.25 / n as f64).sqrt();
        for k in ones {
            assert!((k as f64 / n as f64 - 0.5).abs() < 3.0 * sigma);
        }
        let sigma_pair = (0.25 * 0.75 / n as f64).sqrt();
        assert!((both as f64 / n as f64 - 0.25).abs() < 3.0 * sigma_pair);
    }

    trait QueryBit {
        fn query_bit(&self, x: &BitString) -> bool;
    }

    impl QueryBit for ClassicalOracle {
        fn query_bit(&self, x: &BitString) -> bool {
            use crate::oracle::Oracle;
            self.query(x).unwrap().bit(0)
        }
    }
}
