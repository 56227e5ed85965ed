//! Hybrid, Markov and distance lemmas, the Col distance claims and the
//! Find success bound.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::SlackReport;
use crate::bits::BitString;
use crate::circuit::{canonical_encode, simulate, simulate_traced, OracleAidedCircuit, OracleStyle, SimError};
use crate::cloners::col_state_of;
use crate::gen::{random_oracle_circuit, random_split, random_table_oracle, CallShape};
use crate::oracle::{find_distribution, puncture, ClassicalOracle, Oracle, OracleBundle, PunctureSet};
use crate::qstate::{
    dist_state, euclidean_distance, min_phase_distance, statistical_distance, trace_distance_pure, BotExtendedState,
    FiniteDistribution, C64,
};

/// Both sides of the hybrid bound for one instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BbbvTerms {
    pub distance: f64,
    /// Number of oracle calls `T`.
    pub queries: usize,
    /// Total query mass `ε` on the differing set, summed over calls.
    pub mass: f64,
}

pub fn bbbv_terms(
    c: &OracleAidedCircuit,
    o: &dyn Oracle,
    o2: &dyn Oracle,
    differing: &BTreeSet<BitString>,
) -> Result<BbbvTerms, SimError> {
    let (fin, trace) = simulate_traced(c, o)?;
    let fin2 = simulate(c, o2)?;
    Ok(BbbvTerms {
        distance: euclidean_distance(&fin, &fin2)?,
        queries: trace.len(),
        mass: trace.query_mass(differing),
    })
}

/// `‖final − final′‖ ≤ √(T·ε)`, the hybrid bound in its stated form.
pub fn check_bbbv(t: &BbbvTerms, seed: u64) -> SlackReport {
    SlackReport::le("bbbv", seed, t.distance, (t.queries as f64 * t.mass).sqrt())
}

/// `‖final − final′‖ ≤ 2√(T·ε)`. Each call moves the state by at most
/// twice the amplitude it places on the differing set.
pub fn check_bbbv_corrected(t: &BbbvTerms, seed: u64) -> SlackReport {
    SlackReport::le("bbbv-2x", seed, t.distance, 2.0 * (t.queries as f64 * t.mass).sqrt())
}

/// Random circuit with up to 5 xor calls against a table oracle and a
/// randomly punctured copy.
pub fn random_bbbv<R: Rng + ?Sized>(
    rng: &mut R,
) -> (OracleAidedCircuit, ClassicalOracle, ClassicalOracle, BTreeSet<BitString>) {
    let nq = rng.gen_range(2..=5);
    let qlen = rng.gen_range(1..=(nq - 1).min(2));
    let calls = rng.gen_range(1..=5);
    let between = rng.gen_range(0..=3);
    let shape = CallShape { style: OracleStyle::Xor, query_len: qlen, response_len: 1 };
    let c = random_oracle_circuit(nq, calls, between, shape, rng);
    let o = random_table_oracle(qlen, 1, rng);
    let set: Vec<BitString> = BitString::all(qlen).filter(|_| rng.gen_bool(0.5)).collect();
    let o2 = puncture(o.clone(), PunctureSet::points(set));
    let differing = o.differing_set(&o2);
    (c, o, o2, differing)
}

/// A Markov chain `v_0, …, v_τ` over `states` values.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    pub states: usize,
    pub init: Vec<f64>,
    /// `steps[i][a * states + b] = Pr[v_{i+1} = b | v_i = a]`.
    pub steps: Vec<Vec<f64>>,
}

const STATE_BITS: usize = 2;

impl ChainSpec {
    fn weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }

    fn random_step<R: Rng + ?Sized>(states: usize, rng: &mut R) -> Vec<f64> {
        (0..states).flat_map(|_| Self::weights(states, rng)).collect()
    }

    pub fn random<R: Rng + ?Sized>(states: usize, tau: usize, rng: &mut R) -> Self {
        assert!((1..=4).contains(&states));
        ChainSpec {
            states,
            init: Self::weights(states, rng),
            steps: (0..tau).map(|_| Self::random_step(states, rng)).collect(),
        }
    }

    /// Joint law of `(v_0, …, v_τ)`, two bits per value, `v_0` lowest.
    pub fn joint(&self) -> FiniteDistribution {
        let mut paths: Vec<(u64, f64)> = (0..self.states).map(|a| (a as u64, self.init[a])).collect();
        for (i, step) in self.steps.iter().enumerate() {
            let shift = STATE_BITS * (i + 1);
            paths = paths
                .into_iter()
                .flat_map(|(path, p)| {
                    let a = (path >> (shift - STATE_BITS)) as usize & 3;
                    (0..self.states).map(move |b| (path | ((b as u64) << shift), p * step[a * self.states + b]))
                })
                .collect();
        }
        let len = STATE_BITS * (self.steps.len() + 1);
        FiniteDistribution::from_weights(paths.into_iter().map(|(v, p)| (BitString::new(v, len), p))).expect("mass")
    }
}

/// `SD(v, w) ≤ 2·Σ_i SD((v_{i−1}, v_i), (w_{i−1}, w_i))`. The pair laws are
/// read off the joint laws.
pub fn check_markov_tv(v: &ChainSpec, w: &ChainSpec, seed: u64) -> SlackReport {
    let (jv, jw) = (v.joint(), w.joint());
    let lhs = statistical_distance(&jv, &jw);
    let rhs: f64 = (1..=v.steps.len())
        .map(|i| {
            let off = STATE_BITS * (i - 1);
            statistical_distance(&jv.marginal(off, 2 * STATE_BITS), &jw.marginal(off, 2 * STATE_BITS))
        })
        .sum();
    SlackReport::le("markov-tv", seed, lhs, 2.0 * rhs)
}

/// Pair of 3-step chains; `w` equals `v`, differs in step 1 only, or is
/// unrelated, with equal odds.
pub fn random_markov<R: Rng + ?Sized>(rng: &mut R) -> (ChainSpec, ChainSpec) {
    let states = rng.gen_range(2..=4);
    let v = ChainSpec::random(states, 3, rng);
    let w = match rng.gen_range(0..3) {
        0 => v.clone(),
        1 => {
            let mut w = v.clone();
            w.steps[0] = ChainSpec::random_step(states, rng);
            w
        }
        _ => ChainSpec::random(states, 3, rng),
    };
    (v, w)
}

/// `TD ≤ ED` and `TD ≥ min-phase-ED/√2` on a pure pair.
pub fn check_distance_lemmas(a: &BotExtendedState, b: &BotExtendedState, seed: u64) -> Vec<SlackReport> {
    let td = trace_distance_pure(a, b).expect("normalized pair");
    let ed = euclidean_distance(a, b).expect("same space");
    let mp = min_phase_distance(a, b).expect("normalized pair");
    vec![SlackReport::le("td-le-ed", seed, td, ed), SlackReport::le("td-ge-phase-ed", seed, mp / 2f64.sqrt(), td)]
}

/// `‖|𝒟⟩ − |𝒟′⟩‖ ≤ √(2·SD(𝒟, 𝒟′))`.
pub fn check_ed_sd(p: &FiniteDistribution, q: &FiniteDistribution, seed: u64) -> SlackReport {
    let ed = euclidean_distance(&dist_state(p).expect("dist"), &dist_state(q).expect("dist")).expect("same space");
    SlackReport::le("ed-le-sd", seed, ed, (2.0 * statistical_distance(p, q)).sqrt())
}

fn abs_state(s: &BotExtendedState) -> Vec<C64> {
    s.amplitudes().iter().map(|z| C64::new(z.norm(), 0.0)).collect()
}

fn vec_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `‖|ψ̂⟩ − |ψ̂′⟩‖ ≤ ‖|ψ⟩ − |ψ′⟩‖` for entrywise moduli.
pub fn check_real_distances(a: &BotExtendedState, b: &BotExtendedState, seed: u64) -> SlackReport {
    let lhs = vec_distance(&abs_state(a), &abs_state(b));
    SlackReport::le("real-distances", seed, lhs, euclidean_distance(a, b).expect("same space"))
}

fn doubled_pair(
    c: &OracleAidedCircuit,
    o: &dyn Oracle,
    o2: &dyn Oracle,
) -> Option<(BotExtendedState, BotExtendedState)> {
    let key = canonical_encode(c);
    let s1 = col_state_of(c, key.clone(), o);
    let s2 = col_state_of(c, key, o2);
    Some((s1.state()?.clone(), s2.state()?.clone()))
}

/// `‖|ψ^O_C⟩ − |ψ^{O′}_C⟩‖ ≤ 3‖C^O|0⟩ − C^{O′}|0⟩‖`; `None` if `C` is not a
/// valid Col key.
pub fn check_abcd(c: &OracleAidedCircuit, o: &dyn Oracle, o2: &dyn Oracle, seed: u64) -> Option<SlackReport> {
    let (d1, d2) = doubled_pair(c, o, o2)?;
    let lhs = euclidean_distance(&d1, &d2).ok()?;
    let rhs = euclidean_distance(&simulate(c, o).ok()?, &simulate(c, o2).ok()?).ok()?;
    Some(SlackReport::le("abcd", seed, lhs, 3.0 * rhs))
}

/// `‖|DCol^O_C⟩ − |DCol^{O′}_C⟩‖ ≤ ‖|ψ^O_C⟩ − |ψ^{O′}_C⟩‖`, with the
/// distribution states built from the sampled laws.
pub fn check_dcol_bridge(c: &OracleAidedCircuit, o: &dyn Oracle, o2: &dyn Oracle, seed: u64) -> Option<SlackReport> {
    let key = canonical_encode(c);
    let s1 = col_state_of(c, key.clone(), o);
    let s2 = col_state_of(c, key, o2);
    let q1 = dist_state(&s1.distribution()?).ok()?;
    let q2 = dist_state(&s2.distribution()?).ok()?;
    let lhs = euclidean_distance(&q1, &q2).ok()?;
    Some(SlackReport::le("dcol-bridge", seed, lhs, euclidean_distance(s1.state()?, s2.state()?).ok()?))
}

/// Random circuit with a random output split, a table oracle and a copy
/// that is equal, rewritten on some rows, or punctured on some rows.
pub fn random_abcd<R: Rng + ?Sized>(rng: &mut R) -> (OracleAidedCircuit, ClassicalOracle, ClassicalOracle) {
    let nq = rng.gen_range(2..=4);
    let qlen = rng.gen_range(1..=(nq - 1).min(2));
    let rlen = rng.gen_range(1..=(nq - qlen).min(2));
    let calls = rng.gen_range(1..=2);
    let between = rng.gen_range(1..=3);
    let shape = CallShape { style: OracleStyle::Xor, query_len: qlen, response_len: rlen };
    let (a, b) = random_split(nq, 2, rng);
    let c = random_oracle_circuit(nq, calls, between, shape, rng).with_split(a, b);
    let o = random_table_oracle(qlen, rlen, rng);
    let o2 = match rng.gen_range(0..3) {
        0 => o.clone(),
        1 => {
            let other = random_table_oracle(qlen, rlen, rng);
            let keep: Vec<bool> = (0..1 << qlen).map(|_| rng.gen_bool(0.5)).collect();
            ClassicalOracle::from_fn(qlen, rlen, |x| if keep[x.value() as usize] { o.query(x) } else { other.query(x) })
        }
        _ => {
            let set: Vec<BitString> = BitString::all(qlen).filter(|_| rng.gen_bool(0.5)).collect();
            puncture(o.clone(), PunctureSet::points(set))
        }
    };
    (c, o, o2)
}

/// `Pr[f′(y′) ≠ f″(y′) : y′ ← Find^{f′}(y)] ≥ 1/(2|y|)`, where `f′, f″` are
/// the bundle's `f` punctured on the given sets. `None` when the two
/// bundles agree at `y`, so the lemma says nothing.
pub fn check_find(
    bundle: &OracleBundle,
    p1: &PunctureSet,
    p2: &PunctureSet,
    y: &BitString,
    seed: u64,
) -> Option<SlackReport> {
    let v1 = bundle.punctured(p1.clone(), PunctureSet::empty());
    let v2 = bundle.punctured(p2.clone(), PunctureSet::empty());
    if v1.query(y) == v2.query(y) {
        return None;
    }
    let law = find_distribution(&v1.f_oracle(), bundle, y);
    let hit: f64 = law
        .iter()
        .filter_map(|(out, p)| out.as_ref().map(|z| (z, p)))
        .filter(|(z, _)| z.len() == bundle.lambda() && v1.f(z) != v2.f(z))
        .map(|(_, p)| p)
        .sum();
    Some(SlackReport::le("find", seed, 1.0 / (2.0 * y.len() as f64), hit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::qstate::FiniteDistribution;
    use crate::seed::rng_from_seed;

    #[test]
    fn empty_differing_set_gives_zero_distance() {
        let mut rng = rng_from_seed(2);
        let (c, o, _, _) = random_bbbv(&mut rng);
        let t = bbbv_terms(&c, &o, &o, &BTreeSet::new()).unwrap();
        assert!(t.distance < 1e-12 && t.mass == 0.0);
    }

    #[test]
    fn single_phase_flip_exceeds_root_eps() {
        // |x=1⟩ with one phase query, O(1) = 1 against the all-zero oracle:
        // distance 2 while T·ε = 1.
        let c = OracleAidedCircuit::with_gates(
            1,
            vec![Gate::X(0), Gate::Oracle { style: OracleStyle::Phase, query: vec![0], response: vec![] }],
        );
        let o = ClassicalOracle::from_fn(1, 1, |x| Some(*x));
        let o2 = ClassicalOracle::from_fn(1, 1, |_| Some(BitString::zeros(1)));
        let t = bbbv_terms(&c, &o, &o2, &o.differing_set(&o2)).unwrap();
        assert!((t.distance - 2.0).abs() < 1e-12);
        assert!((t.mass - 1.0).abs() < 1e-12);
        assert!(!check_bbbv(&t, 0).pass);
        assert!(check_bbbv_corrected(&t, 0).pass);
    }

    #[test]
    fn partial_amplitude_phase_flip() {
        // Amplitude a on the flipped input moves the state by 2|a|.
        let c = OracleAidedCircuit::with_gates(
            1,
            vec![Gate::H(0), Gate::Oracle { style: OracleStyle::Phase, query: vec![0], response: vec![] }],
        );
        let o = ClassicalOracle::from_fn(1, 1, |x| Some(*x));
        let o2 = ClassicalOracle::from_fn(1, 1, |_| Some(BitString::zeros(1)));
        let t = bbbv_terms(&c, &o, &o2, &o.differing_set(&o2)).unwrap();
        assert!((t.distance - 2.0 * 0.5f64.sqrt()).abs() < 1e-12);
        assert!((t.mass - 0.5).abs() < 1e-12);
    }

    #[test]
    fn markov_identical_and_first_step() {
        let mut rng = rng_from_seed(5);
        let v = ChainSpec::random(3, 3, &mut rng);
        let r = check_markov_tv(&v, &v, 0);
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);
        let mut w = v.clone();
        w.steps[0] = ChainSpec::random_step(3, &mut rng);
        let r = check_markov_tv(&v, &w, 0);
        assert!(r.pass && r.lhs > 0.0);
        let jv = v.joint();
        let total: f64 = jv.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_pair_closed_form() {
        let a = BotExtendedState::basis(1, 0);
        let b = BotExtendedState::basis(1, 1);
        let r = check_distance_lemmas(&a, &b, 0);
        assert!((r[0].lhs - 1.0).abs() < 1e-12 && (r[0].rhs - 2f64.sqrt()).abs() < 1e-12);
        assert!((r[1].lhs - 1.0).abs() < 1e-12 && (r[1].rhs - 1.0).abs() < 1e-12);
        let p = FiniteDistribution::point(BitString::new(0, 1));
        let q = FiniteDistribution::point(BitString::new(1, 1));
        let r = check_ed_sd(&p, &q, 0);
        assert!((r.lhs - 2f64.sqrt()).abs() < 1e-12 && (r.rhs - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn abcd_random_instances_pass() {
        let mut rng = rng_from_seed(6);
        for i in 0..200 {
            let (c, o, o2) = random_abcd(&mut rng);
            assert!(check_abcd(&c, &o, &o2, i).unwrap().pass);
            assert!(check_dcol_bridge(&c, &o, &o2, i).unwrap().pass);
        }
    }
}
