//! The inversion game for f against the hybrid bundles `S₁…S₄`.
//!
//! Obf is sampled once per experiment. Each trial draws a fresh permutation
//! f and fresh `x`, `x′` from its own stream, so runs are reproducible and
//! independent of scheduling.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitString;
use crate::circuit::classical::{ClassicalOp, ClassicalProgram};
use crate::oracle::bundle::{find, sample_bundle, sample_permutation, BundleError, BundleView, OracleBundle};
use crate::oracle::{Oracle, PunctureSet};
use crate::seed::{trial_rng, SeededRng};
use crate::verify::{check_find, SlackReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Hybrid {
    S1,
    S2,
    S3,
    S4,
}

impl Hybrid {
    pub const ALL: [Hybrid; 4] = [Hybrid::S1, Hybrid::S2, Hybrid::S3, Hybrid::S4];

    /// Points where f is punctured.
    pub fn punctured(self, x: BitString, x2: BitString) -> PunctureSet {
        match self {
            Hybrid::S1 => PunctureSet::points([x2]),
            Hybrid::S2 => PunctureSet::points([x, x2]),
            Hybrid::S3 => PunctureSet::points([x]),
            Hybrid::S4 => PunctureSet::empty(),
        }
    }

    /// The hybrid this one is compared against when bounding the move.
    pub fn neighbour(self) -> Hybrid {
        match self {
            Hybrid::S1 => Hybrid::S2,
            Hybrid::S2 => Hybrid::S3,
            Hybrid::S3 => Hybrid::S4,
            Hybrid::S4 => Hybrid::S3,
        }
    }

    /// Whether the default challenge is `f(x)` rather than `f(x′)`.
    pub fn challenges_x(self) -> bool {
        matches!(self, Hybrid::S3 | Hybrid::S4)
    }
}

impl fmt::Display for Hybrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Hybrid::S1 => "s1",
            Hybrid::S2 => "s2",
            Hybrid::S3 => "s3",
            Hybrid::S4 => "s4",
        };
        f.write_str(s)
    }
}

impl FromStr for Hybrid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(Hybrid::S1),
            "s2" => Ok(Hybrid::S2),
            "s3" => Ok(Hybrid::S3),
            "s4" => Ok(Hybrid::S4),
            _ => Err(format!("unknown hybrid {s:?}")),
        }
    }
}

/// Inverting adversaries. The integer is the query budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OwpAdversary {
    /// Uniform λ-bit guess, no queries.
    RandomGuess,
    /// Outputs its challenge unchanged.
    Echo,
    /// Queries every input; unbounded.
    Exhaustive,
    /// Queries f on `k` distinct random points, else guesses.
    BoundedSearch(usize),
    /// Obfuscates the program `f` and searches through Eval on `k` points.
    EvalSearch(usize),
    /// Outputs the Eval query `c̃ ‖ z` for the obfuscated `f` and random `z`.
    EvalProbe,
}

impl OwpAdversary {
    pub fn run(&self, view: &BundleView<'_>, y: &BitString, rng: &mut SeededRng) -> Option<BitString> {
        let l = view.lambda();
        let guess = |rng: &mut SeededRng| BitString::new(rng.gen_range(0..1u64 << l), l);
        match *self {
            OwpAdversary::RandomGuess => Some(guess(rng)),
            OwpAdversary::Echo => Some(*y),
            OwpAdversary::Exhaustive => {
                BitString::all(l).find(|z| view.f(z).as_ref() == Some(y)).or_else(|| Some(guess(rng)))
            }
            OwpAdversary::BoundedSearch(k) => {
                let k = k.min(1 << l);
                sample(rng, 1 << l, k)
                    .iter()
                    .map(|v| BitString::new(v as u64, l))
                    .find(|z| view.f(z).as_ref() == Some(y))
                    .or_else(|| Some(guess(rng)))
            }
            OwpAdversary::EvalSearch(k) => {
                let ct = obfuscated_f(view, rng)?;
                let k = k.min(1 << l);
                sample(rng, 1 << l, k)
                    .iter()
                    .map(|v| BitString::new(v as u64, l))
                    .find(|z| view.eval(&ct, z).as_ref() == Some(y))
                    .or_else(|| Some(guess(rng)))
            }
            OwpAdversary::EvalProbe => {
                let ct = obfuscated_f(view, rng)?;
                Some(ct.concat(&guess(rng)))
            }
        }
    }
}

fn obfuscated_f(view: &BundleView<'_>, rng: &mut SeededRng) -> Option<BitString> {
    let l = view.lambda();
    let c = ClassicalProgram::encode(&[ClassicalOp::F], l)?;
    view.obf(&c.bits(), &BitString::new(rng.gen_range(0..1u64 << l), l))
}

/// Which preimage the challenge is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Challenge {
    /// `f(x)` for S₃ and S₄, `f(x′)` for S₁ and S₂.
    #[default]
    Default,
    X,
    XPrime,
}

#[derive(Clone, Copy, Debug)]
pub struct OwpConfig {
    pub lambda: usize,
    pub hybrid: Hybrid,
    pub adversary: OwpAdversary,
    pub trials: usize,
    pub seed: u64,
    /// Post-process the adversary's output with `Find^{f′}`.
    pub find_augmented: bool,
    pub challenge: Challenge,
}

/// Per-trial hits on the three target events.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub hit_x: bool,
    pub hit_x2: bool,
    pub hit_differ: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OwpCounts {
    pub trials: usize,
    pub hit_x: usize,
    pub hit_x2: usize,
    pub hit_differ: usize,
}

/// One row of an experiment table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub hybrid: String,
    pub lambda: usize,
    pub trials: usize,
    pub event: String,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

/// Wilson score interval at `z` standard deviations.
pub fn wilson(hits: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

impl OwpCounts {
    pub fn records(&self, cfg: &OwpConfig) -> Vec<ExperimentRecord> {
        [("out=x", self.hit_x), ("out=x'", self.hit_x2), ("out-in-differ", self.hit_differ)]
            .into_iter()
            .map(|(event, hits)| {
                let (lo, hi) = wilson(hits, self.trials, 3.0);
                ExperimentRecord {
                    hybrid: cfg.hybrid.to_string(),
                    lambda: cfg.lambda,
                    trials: self.trials,
                    event: event.to_string(),
                    rate: hits as f64 / self.trials.max(1) as f64,
                    ci_low: lo,
                    ci_high: hi,
                    seed: cfg.seed,
                }
            })
            .collect()
    }
}

/// The trial's f, x, x′, drawn before any adversary randomness.
fn trial_instance(obf: &OracleBundle, rng: &mut SeededRng) -> (OracleBundle, BitString, BitString) {
    let l = obf.lambda();
    let f = sample_permutation(l, rng);
    let x = BitString::new(rng.gen_range(0..1u64 << l), l);
    let x2 = BitString::new(rng.gen_range(0..1u64 << l), l);
    (obf.with_f(f), x, x2)
}

fn play(
    cfg: &OwpConfig,
    challenge: Challenge,
    bundle: &OracleBundle,
    x: BitString,
    x2: BitString,
    rng: &mut SeededRng,
) -> TrialOutcome {
    let view = bundle.punctured(cfg.hybrid.punctured(x, x2), PunctureSet::empty());
    let other = bundle.punctured(cfg.hybrid.neighbour().punctured(x, x2), PunctureSet::empty());
    let pre = match challenge {
        Challenge::X => x,
        Challenge::XPrime => x2,
        Challenge::Default if cfg.hybrid.challenges_x() => x,
        Challenge::Default => x2,
    };
    let y = bundle.f(&pre).expect("λ-bit preimage");
    let mut out = cfg.adversary.run(&view, &y, rng);
    if cfg.find_augmented {
        out = out.and_then(|z| find(&view.f_oracle(), bundle, &z, rng));
    }
    match out {
        None => TrialOutcome::default(),
        Some(z) => TrialOutcome { hit_x: z == x, hit_x2: z == x2, hit_differ: view.query(&z) != other.query(&z) },
    }
}

/// Runs `cfg.trials` independent games.
pub fn owp_hybrid_experiment(cfg: &OwpConfig) -> Result<OwpCounts, BundleError> {
    let obf = sample_bundle(cfg.lambda, cfg.seed)?;
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, "owp", i as u64);
            let (bundle, x, x2) = trial_instance(&obf, &mut rng);
            play(cfg, cfg.challenge, &bundle, x, x2, &mut rng)
        })
        .collect();
    Ok(outcomes.iter().fold(OwpCounts { trials: cfg.trials, ..Default::default() }, |mut c, t| {
        c.hit_x += t.hit_x as usize;
        c.hit_x2 += t.hit_x2 as usize;
        c.hit_differ += t.hit_differ as usize;
        c
    }))
}

/// `Pr[out = x | f(x)] − Pr[out = x | f(x′)]` under S₂ over matched trials,
/// with the standard error of the paired difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryEstimate {
    pub trials: usize,
    pub diff: f64,
    pub sigma: f64,
}

pub fn s2_symmetry(
    lambda: usize,
    adversary: OwpAdversary,
    trials: usize,
    seed: u64,
) -> Result<SymmetryEstimate, BundleError> {
    let cfg = OwpConfig {
        lambda,
        hybrid: Hybrid::S2,
        adversary,
        trials,
        seed,
        find_augmented: false,
        challenge: Challenge::Default,
    };
    let obf = sample_bundle(lambda, seed)?;
    let d: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, "owp-sym", i as u64);
            let (bundle, x, x2) = trial_instance(&obf, &mut rng);
            let mut r2 = rng.clone();
            let a = play(&cfg, Challenge::X, &bundle, x, x2, &mut rng).hit_x as u8 as f64;
            let b = play(&cfg, Challenge::XPrime, &bundle, x, x2, &mut r2).hit_x as u8 as f64;
            a - b
        })
        .collect();
    let n = trials.max(1) as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(SymmetryEstimate { trials, diff: mean, sigma: (var / n).sqrt() })
}

/// Find checks on Eval queries whose run under `f_{x′}` touches `x`, the
/// disagreement point of `f_{x′}` and `f_{x,x′}`. Programs are drawn at
/// random; every input `x̃` that makes the two views disagree is checked,
/// together with the plain query `y = x`.
pub fn planted_find_reports(bundle: &OracleBundle, programs: usize, seed: u64) -> Vec<SlackReport> {
    let l = bundle.lambda();
    let mut rng = trial_rng(seed, "find-planted", 0);
    let x = BitString::new(rng.gen_range(0..1u64 << l), l);
    let mut x2 = x;
    while x2 == x {
        x2 = BitString::new(rng.gen_range(0..1u64 << l), l);
    }
    let p1 = Hybrid::S1.punctured(x, x2);
    let p2 = Hybrid::S2.punctured(x, x2);
    let mut out: Vec<SlackReport> = check_find(bundle, &p1, &p2, &x, seed).into_iter().collect();
    for i in 0..programs {
        let mut prng = trial_rng(seed, "find-program", i as u64);
        let mut ops: Vec<ClassicalOp> = (0..l / 2)
            .map(|_| [ClassicalOp::Nop, ClassicalOp::F, ClassicalOp::Not, ClassicalOp::Rot][prng.gen_range(0..4)])
            .collect();
        let at = prng.gen_range(0..ops.len());
        ops[at] = ClassicalOp::F;
        let c = ClassicalProgram::encode(&ops, l).expect("ops fit");
        let r = BitString::new(prng.gen_range(0..1u64 << l), l);
        let ct = bundle.obf(&c.bits(), &r).expect("λ-bit inputs");
        for xt in BitString::all(l) {
            let y = ct.concat(&xt);
            if let Some(rep) = check_find(bundle, &p1, &p2, &y, derive(seed, i, xt)) {
                out.push(rep);
            }
        }
    }
    out
}

fn derive(seed: u64, i: usize, xt: BitString) -> u64 {
    crate::seed::derive_seed(seed, "find-instance", ((i as u64) << 32) | xt.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(hybrid: Hybrid, adversary: OwpAdversary, trials: usize) -> OwpConfig {
        OwpConfig {
            lambda: 4,
            hybrid,
            adversary,
            trials,
            seed: 9,
            find_augmented: false,
            challenge: Challenge::Default,
        }
    }

    #[test]
    fn exhaustive_search_always_inverts_s4() {
        let c = owp_hybrid_experiment(&cfg(Hybrid::S4, OwpAdversary::Exhaustive, 200)).unwrap();
        assert_eq!(c.hit_x, 200);
    }

    #[test]
    fn s1_hides_x_from_exhaustive_search() {
        // The challenge is f(x′) and f is punctured there, so the search fails
        // and the guess is independent of x.
        let c = owp_hybrid_experiment(&cfg(Hybrid::S1, OwpAdversary::Exhaustive, 2000)).unwrap();
        let p: f64 = 1.0 / 16.0;
        let sigma = (p * (1.0 - p) / 2000.0).sqrt();
        assert!((c.hit_x as f64 / 2000.0 - p).abs() <= 3.0 * sigma + 1e-12);
    }

    #[test]
    fn experiment_is_reproducible() {
        let a = owp_hybrid_experiment(&cfg(Hybrid::S2, OwpAdversary::BoundedSearch(3), 500)).unwrap();
        let b = owp_hybrid_experiment(&cfg(Hybrid::S2, OwpAdversary::BoundedSearch(3), 500)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn find_on_eval_probe_hits_differ_set() {
        let mut c = cfg(Hybrid::S3, OwpAdversary::EvalProbe, 400);
        c.find_augmented = true;
        let out = owp_hybrid_experiment(&c).unwrap();
        assert!(out.hit_x <= out.trials);
    }

    #[test]
    fn wilson_interval_covers_rate() {
        let (lo, hi) = wilson(5, 100, 3.0);
        assert!(lo < 0.05 && 0.05 < hi);
        let (lo, hi) = wilson(0, 100, 3.0);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
    }

    #[test]
    fn planted_find_meets_bound() {
        let b = sample_bundle(4, 2).unwrap();
        let reps = planted_find_reports(&b, 8, 2);
        assert!(reps.len() > 1);
        assert!(reps.iter().all(|r| r.pass), "{reps:?}");
    }

    #[test]
    fn symmetry_difference_is_small() {
        let s = s2_symmetry(4, OwpAdversary::Echo, 4000, 1).unwrap();
        assert!(s.diff.abs() <= 3.0 * s.sigma + 1e-12, "{s:?}");
    }
}
