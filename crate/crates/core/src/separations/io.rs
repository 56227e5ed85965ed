//! The iO security game over the bundle, and exact challenge laws for the
//! game in which Obf is punctured at the challenge randomness.
//!
//! In the punctured game the adversary sees Obf everywhere except on the
//! slice `(*, r)`. That slice is a uniform injection into the strings the
//! visible part leaves free, so the challenge law is computed by averaging
//! over every way of filling it.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::Rng;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::circuit::classical::{functionally_equivalent, ClassicalProgram};
use crate::oracle::bundle::OracleBundle;
use crate::qstate::{statistical_distance, FiniteDistribution, StateError};
use crate::seed::trial_rng;

/// Largest λ for which the challenge law is enumerated.
pub const MAX_CHALLENGE_LAMBDA: usize = 4;
/// Largest λ for which the hidden slice is enumerated bijection by bijection.
pub const MAX_VIEW_LAMBDA: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IoStrategy {
    /// A coin flip, no queries.
    RandomGuess,
    /// The low bit of the challenge.
    LowBit,
    /// Searches `Obf(C₀, ·)` for the challenge; wins outright unpunctured.
    Invert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IoAdversary {
    pub c0: BitString,
    pub c1: BitString,
    pub strategy: IoStrategy,
}

impl IoAdversary {
    fn guess<R: Rng + ?Sized>(
        &self,
        obf: &mut impl FnMut(&BitString, &BitString) -> BitString,
        ct: &BitString,
        rng: &mut R,
    ) -> bool {
        let l = self.c0.len();
        match self.strategy {
            IoStrategy::RandomGuess => rng.gen_bool(0.5),
            IoStrategy::LowBit => ct.bit(0),
            IoStrategy::Invert => !BitString::all(l).any(|r| obf(&self.c0, &r) == *ct),
        }
    }
}

/// Both programs are λ-bit and agree on every input under f.
pub fn admissible(bundle: &OracleBundle, c0: &BitString, c1: &BitString) -> bool {
    let l = bundle.lambda();
    let view = bundle.view();
    c0.len() == l
        && c1.len() == l
        && functionally_equivalent(
            &ClassicalProgram::from_bits(*c0),
            &ClassicalProgram::from_bits(*c1),
            &view.f_oracle(),
        )
}

/// One play against the bundle's own Obf table; `None` is ⊥.
pub fn io_game<R: Rng + ?Sized>(b: bool, adversary: &IoAdversary, bundle: &OracleBundle, rng: &mut R) -> Option<bool> {
    if !admissible(bundle, &adversary.c0, &adversary.c1) {
        return None;
    }
    let l = bundle.lambda();
    let r = BitString::new(rng.gen_range(0..1u64 << l), l);
    let cb = if b { adversary.c1 } else { adversary.c0 };
    let ct = bundle.obf(&cb, &r)?;
    let mut obf = |c: &BitString, r: &BitString| bundle.obf(c, r).expect("λ-bit arguments");
    Some(adversary.guess(&mut obf, &ct, rng))
}

/// A uniform injection `{0,1}^{2λ} → {0,1}^{3λ}`, sampled point by point.
struct LazyInjection {
    lambda: usize,
    table: HashMap<u64, u64>,
    used: HashSet<u64>,
}

impl LazyInjection {
    fn new(lambda: usize) -> Self {
        LazyInjection { lambda, table: HashMap::new(), used: HashSet::new() }
    }

    fn get<R: Rng + ?Sized>(&mut self, c: &BitString, r: &BitString, rng: &mut R) -> BitString {
        let l = self.lambda;
        let key = c.concat(r).value();
        let v = *self.table.entry(key).or_insert_with(|| loop {
            let v = rng.gen_range(0..1u64 << (3 * l));
            if self.used.insert(v) {
                break v;
            }
        });
        BitString::new(v, 3 * l)
    }
}

/// One play with f from `bundle` and a fresh Obf; `None` is ⊥.
fn io_game_fresh<R: Rng + ?Sized>(
    b: bool,
    adversary: &IoAdversary,
    bundle: &OracleBundle,
    rng: &mut R,
) -> Option<bool> {
    if !admissible(bundle, &adversary.c0, &adversary.c1) {
        return None;
    }
    let l = bundle.lambda();
    let mut obf_rng = trial_rng(rng.gen(), "io-obf", 0);
    let mut lazy = LazyInjection::new(l);
    let r = BitString::new(rng.gen_range(0..1u64 << l), l);
    let cb = if b { adversary.c1 } else { adversary.c0 };
    let ct = lazy.get(&cb, &r, &mut obf_rng);
    let mut obf = |c: &BitString, r: &BitString| lazy.get(c, r, &mut obf_rng);
    Some(adversary.guess(&mut obf, &ct, rng))
}

/// `Pr[1 | b = 1] − Pr[1 | b = 0]` over matched trials, with the standard
/// error of the paired difference. f is the bundle's; Obf is redrawn every
/// trial, so the estimate averages over the oracle. `None` when the pair is
/// inadmissible.
pub fn io_advantage(adversary: &IoAdversary, bundle: &OracleBundle, trials: usize, seed: u64) -> Option<(f64, f64)> {
    if !admissible(bundle, &adversary.c0, &adversary.c1) {
        return None;
    }
    let d: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r0 = trial_rng(seed, "io-game", i as u64);
            let mut r1 = r0.clone();
            let g1 = io_game_fresh(true, adversary, bundle, &mut r1).unwrap_or(false) as u8 as f64;
            let g0 = io_game_fresh(false, adversary, bundle, &mut r0).unwrap_or(false) as u8 as f64;
            g1 - g0
        })
        .collect();
    let n = trials.max(1) as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Some((mean, (var / n).sqrt()))
}

/// All unordered pairs of distinct, functionally equivalent λ-bit programs.
pub fn equivalent_pairs(bundle: &OracleBundle) -> Vec<(BitString, BitString)> {
    let l = bundle.lambda();
    let progs: Vec<BitString> = BitString::all(l).collect();
    let mut out = Vec::new();
    for (i, a) in progs.iter().enumerate() {
        for b in &progs[i + 1..] {
            if admissible(bundle, a, b) {
                out.push((*a, *b));
            }
        }
    }
    out
}

/// Strings of `{0,1}^{3λ}` not used by Obf outside the slice `(*, r)`.
fn free_slots(bundle: &OracleBundle, r: &BitString) -> Vec<u64> {
    let l = bundle.lambda();
    let visible: BTreeSet<u64> = BitString::all(l)
        .flat_map(|c| BitString::all(l).map(move |rr| (c, rr)))
        .filter(|(_, rr)| rr != r)
        .map(|(c, rr)| bundle.obf(&c, &rr).expect("λ-bit inputs").value())
        .collect();
    (0..1u64 << (3 * l)).filter(|v| !visible.contains(v)).collect()
}

/// Exact law of the challenge `Obf(C_b, r)` when `r` is uniform and the
/// slice `(*, r)` is re-drawn among injections consistent with the rest of
/// the table.
pub fn punctured_challenge_law(bundle: &OracleBundle, cb: &BitString) -> Result<FiniteDistribution, StateError> {
    let l = bundle.lambda();
    assert!(l <= MAX_CHALLENGE_LAMBDA);
    assert_eq!(cb.len(), l);
    let w = 1.0 / (1u64 << l) as f64;
    let mut law: BTreeMap<u64, f64> = BTreeMap::new();
    for r in BitString::all(l) {
        let free = free_slots(bundle, &r);
        let p = w / free.len() as f64;
        for v in free {
            *law.entry(v).or_insert(0.0) += p;
        }
    }
    FiniteDistribution::from_weights(law.into_iter().map(|(v, p)| (BitString::new(v, 3 * l), p)))
}

/// Law of `Obf(C_b, r)` over `r` with the table held fixed.
pub fn fixed_table_challenge_law(bundle: &OracleBundle, cb: &BitString) -> Result<FiniteDistribution, StateError> {
    let l = bundle.lambda();
    FiniteDistribution::from_weights(BitString::all(l).map(|r| (bundle.obf(cb, &r).expect("λ-bit inputs"), 1.0)))
}

/// Everything Eval reveals about the hidden slice, plus the challenge: for
/// each slot of the slice image (in increasing order) the truth table of
/// the program placed there, and the index of the challenge slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SliceView {
    pub r: u64,
    pub labels: Vec<Vec<Option<u64>>>,
    pub challenge: usize,
}

fn truth_table(bundle: &OracleBundle, c: &BitString) -> Vec<Option<u64>> {
    let view = bundle.view();
    let p = ClassicalProgram::from_bits(*c);
    BitString::all(bundle.lambda()).map(|x| p.run(&x, &view.f_oracle()).map(|y| y.value())).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Exact law of [`SliceView`] for challenge program `cb`, with `r` uniform and
/// the slice re-drawn as a uniform bijection onto its sampled image. The
/// `b`-independence of this law is the zero-advantage property of the
/// punctured game.
pub fn punctured_view_law(bundle: &OracleBundle, cb: &BitString) -> BTreeMap<SliceView, f64> {
    let l = bundle.lambda();
    assert!(l <= MAX_VIEW_LAMBDA);
    let programs: Vec<BitString> = BitString::all(l).collect();
    let tables: Vec<Vec<Option<u64>>> = programs.iter().map(|c| truth_table(bundle, c)).collect();
    let perms = permutations(programs.len());
    let w = 1.0 / ((1u64 << l) as f64 * perms.len() as f64);
    let mut law = BTreeMap::new();
    for r in BitString::all(l) {
        // The slot order is that of the sorted image, so a bijection is a
        // permutation assigning program `perm[k]` to slot `k`.
        for perm in &perms {
            let labels = perm.iter().map(|&c| tables[c].clone()).collect();
            let challenge = perm.iter().position(|&c| programs[c] == *cb).expect("bijection");
            *law.entry(SliceView { r: r.value(), labels, challenge }).or_insert(0.0) += w;
        }
    }
    law
}

/// Largest pointwise difference of two view laws.
pub fn view_law_distance(a: &BTreeMap<SliceView, f64>, b: &BTreeMap<SliceView, f64>) -> f64 {
    let keys: BTreeSet<&SliceView> = a.keys().chain(b.keys()).collect();
    keys.into_iter().map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs()).fold(0.0, f64::max)
}

/// `SD` of the punctured challenge laws for `C₀` and `C₁`.
pub fn challenge_gap(bundle: &OracleBundle, c0: &BitString, c1: &BitString) -> Result<f64, StateError> {
    Ok(statistical_distance(&punctured_challenge_law(bundle, c0)?, &punctured_challenge_law(bundle, c1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::classical::ClassicalOp;
    use crate::oracle::bundle::sample_bundle;
    use crate::seed::rng_from_seed;

    fn prog(ops: &[ClassicalOp], l: usize) -> BitString {
        ClassicalProgram::encode(ops, l).unwrap().bits()
    }

    #[test]
    fn inequivalent_pair_is_bot() {
        let b = sample_bundle(4, 1).unwrap();
        let adv = IoAdversary { c0: prog(&[ClassicalOp::Not], 4), c1: prog(&[], 4), strategy: IoStrategy::LowBit };
        assert_eq!(io_game(false, &adv, &b, &mut rng_from_seed(0)), None);
    }

    #[test]
    fn wrong_length_is_bot() {
        let b = sample_bundle(4, 1).unwrap();
        let adv = IoAdversary { c0: BitString::zeros(3), c1: BitString::zeros(3), strategy: IoStrategy::LowBit };
        assert_eq!(io_game(true, &adv, &b, &mut rng_from_seed(0)), None);
    }

    #[test]
    fn double_complement_is_equivalent_to_identity() {
        let b = sample_bundle(4, 1).unwrap();
        let pairs = equivalent_pairs(&b);
        let id = prog(&[], 4);
        let nn = prog(&[ClassicalOp::Not, ClassicalOp::Not], 4);
        assert!(pairs.contains(&(id.min(nn), id.max(nn))));
    }

    #[test]
    fn low_bit_has_no_advantage_over_fresh_obf() {
        let b = sample_bundle(3, 2).unwrap();
        let (c0, c1) = equivalent_pairs(&b)[0];
        let adv = IoAdversary { c0, c1, strategy: IoStrategy::LowBit };
        let (a, sigma) = io_advantage(&adv, &b, 4000, 9).unwrap();
        assert!(a.abs() <= 4.0 * sigma + 1e-3, "{a} {sigma}");
    }

    #[test]
    fn invert_wins_unpunctured() {
        let b = sample_bundle(4, 2).unwrap();
        let adv = IoAdversary {
            c0: prog(&[], 4),
            c1: prog(&[ClassicalOp::Not, ClassicalOp::Not], 4),
            strategy: IoStrategy::Invert,
        };
        let (adv, _) = io_advantage(&adv, &b, 200, 3).unwrap();
        assert_eq!(adv, 1.0);
    }

    #[test]
    fn equal_programs_have_zero_advantage() {
        let b = sample_bundle(4, 2).unwrap();
        let c = prog(&[ClassicalOp::F], 4);
        let adv = IoAdversary { c0: c, c1: c, strategy: IoStrategy::LowBit };
        assert_eq!(io_advantage(&adv, &b, 500, 3).unwrap().0, 0.0);
    }

    #[test]
    fn punctured_challenge_ignores_b_but_fixed_table_does_not() {
        let b = sample_bundle(3, 4).unwrap();
        let (c0, c1) = equivalent_pairs(&b)[0];
        assert!(challenge_gap(&b, &c0, &c1).unwrap() < 1e-12);
        let f0 = fixed_table_challenge_law(&b, &c0).unwrap();
        let f1 = fixed_table_challenge_law(&b, &c1).unwrap();
        assert!((statistical_distance(&f0, &f1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn view_law_separates_inequivalent_programs() {
        let b = sample_bundle(2, 5).unwrap();
        let id = prog(&[], 2);
        let not = prog(&[ClassicalOp::Not], 2);
        let a = punctured_view_law(&b, &id);
        let c = punctured_view_law(&b, &not);
        assert!(view_law_distance(&a, &c) > 1e-3);
        assert!((a.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
