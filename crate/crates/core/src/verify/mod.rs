//! Executable forms of the query bounds and distance lemmas. Every checker
//! returns a [`SlackReport`] oriented as `lhs ≤ rhs`.

use rayon::prelude::*;
use serde::Serialize;

use crate::qstate::TOL;
use crate::seed::{derive_seed, rng_from_seed, SeededRng};

pub mod adversary;
pub mod identities;
pub mod lemmas;
pub mod punc;
pub mod suites;

pub use adversary::{check_ow2h_comp, check_ow2h_dist, AdversaryProgram};
pub use identities::{check_csto, check_qcol_conjugation, check_qcol_involution, csto_corpus, CstoInstance};
pub use lemmas::{
    bbbv_terms, check_abcd, check_bbbv, check_bbbv_corrected, check_dcol_bridge, check_distance_lemmas, check_ed_sd,
    check_find, check_markov_tv, check_real_distances, BbbvTerms, ChainSpec,
};
pub use punc::{check_ccol_punc, check_pdqp_punc, PuncInstance};
pub use suites::{run_suite, Suite};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlackReport {
    pub lemma_id: String,
    /// Seed of the instance; `rng_from_seed(seed)` regenerates it.
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl SlackReport {
    pub fn le(lemma_id: &str, seed: u64, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        SlackReport { lemma_id: lemma_id.to_string(), seed, lhs, rhs, slack, pass: slack >= -TOL }
    }
}

/// Runs `n` seeded instances in parallel; output is ordered by instance.
pub fn batch<F>(master: u64, label: &str, n: usize, f: F) -> Vec<SlackReport>
where
    F: Fn(u64, &mut SeededRng) -> Vec<SlackReport> + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master, label, i);
            f(seed, &mut rng_from_seed(seed))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn all_pass(reports: &[SlackReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
