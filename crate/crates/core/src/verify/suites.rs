//! Named batches of seeded checks, as run by the command line and the
//! acceptance tests.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::adversary::{random_ow2h_comp, random_ow2h_dist};
use super::identities::{check_csto, check_qcol_conjugation, check_qcol_involution, csto_instance, random_qcol};
use super::lemmas::{random_abcd, random_bbbv, random_markov};
use super::punc::{random_ccol, random_pdqp};
use super::*;
use crate::gen::{random_distribution, random_state};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Ow2h,
    Distances,
    Bbbv,
    Markov,
    Abcd,
    Punc,
    Qcol,
    Csto,
}

impl Suite {
    pub const ALL: [Suite; 8] =
        [Suite::Csto, Suite::Abcd, Suite::Ow2h, Suite::Distances, Suite::Bbbv, Suite::Markov, Suite::Qcol, Suite::Punc];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ow2h => "ow2h",
            Suite::Distances => "distances",
            Suite::Bbbv => "bbbv",
            Suite::Markov => "markov",
            Suite::Abcd => "abcd",
            Suite::Punc => "punc",
            Suite::Qcol => "qcol",
            Suite::Csto => "csto",
        }
    }

    /// Instance count used when none is given.
    pub fn default_trials(self) -> usize {
        match self {
            Suite::Ow2h | Suite::Markov => 100,
            Suite::Csto => 50,
            Suite::Punc => 40,
            _ => 1000,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Runs `trials` instances of `suite`. Instance `i` is regenerated by
/// `rng_from_seed(derive_seed(master, suite.name(), i))`, except for the
/// fixed corpus, which ignores `master`.
pub fn run_suite(suite: Suite, master: u64, trials: usize) -> Vec<SlackReport> {
    let label = suite.name();
    match suite {
        Suite::Ow2h => {
            let mut out = batch(master, "ow2h-comp", trials, |seed, rng| {
                let (adv, p, p2) = random_ow2h_comp(rng);
                vec![check_ow2h_comp(&adv, &p, &p2, seed)]
            });
            out.extend(batch(master, "ow2h-dist", trials, |seed, rng| {
                let (adv, d, d2) = random_ow2h_dist(rng);
                vec![check_ow2h_dist(&adv, &d, &d2, seed)]
            }));
            out
        }
        Suite::Distances => {
            let mut out = batch(master, "distances-states", trials, |seed, rng| {
                let n = rng.gen_range(1..=4);
                let (a, b) = (random_state(n, rng), random_state(n, rng));
                let mut r = check_distance_lemmas(&a, &b, seed);
                r.push(check_real_distances(&a, &b, seed));
                r
            });
            out.extend(batch(master, "distances-laws", trials, |seed, rng| {
                let n = rng.gen_range(1..=4);
                vec![check_ed_sd(&random_distribution(n, rng), &random_distribution(n, rng), seed)]
            }));
            out
        }
        Suite::Bbbv => batch(master, label, trials, |seed, rng| {
            let (c, o, o2, set) = random_bbbv(rng);
            let t = bbbv_terms(&c, &o, &o2, &set).expect("generated circuits simulate");
            vec![check_bbbv(&t, seed), check_bbbv_corrected(&t, seed)]
        }),
        Suite::Markov => batch(master, label, trials, |seed, rng| {
            let (v, w) = random_markov(rng);
            vec![check_markov_tv(&v, &w, seed)]
        }),
        Suite::Abcd => batch(master, label, trials, |seed, rng| {
            let (c, o, o2) = random_abcd(rng);
            check_abcd(&c, &o, &o2, seed).into_iter().collect()
        }),
        Suite::Punc => {
            let mut out = batch(master, "dcol-bridge", trials, |seed, rng| {
                let (c, o, o2) = random_abcd(rng);
                check_dcol_bridge(&c, &o, &o2, seed).into_iter().collect()
            });
            out.extend(batch(master, "ccol-punc", trials, |seed, rng| {
                check_ccol_punc(&random_ccol(rng), seed).into_iter().collect()
            }));
            out.extend(batch(master, "pdqp-punc", trials, |seed, rng| {
                check_pdqp_punc(&random_pdqp(rng), seed).into_iter().collect()
            }));
            out
        }
        Suite::Qcol => batch(master, label, trials, |seed, rng| {
            let inst = random_qcol(rng);
            vec![check_qcol_involution(&inst, seed), check_qcol_conjugation(&inst, seed)]
        }),
        Suite::Csto => {
            use rayon::prelude::*;
            (0..trials as u64).into_par_iter().map(|i| check_csto(&csto_instance(i), i)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let a = run_suite(Suite::Markov, 4, 10);
        let b = run_suite(Suite::Markov, 4, 10);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
    }

    #[test]
    fn report_seed_regenerates_instance() {
        let reps = run_suite(Suite::Markov, 5, 3);
        let mut rng = crate::seed::rng_from_seed(reps[2].seed);
        let (v, w) = random_markov(&mut rng);
        assert_eq!(check_markov_tv(&v, &w, reps[2].seed), reps[2]);
    }
}
