//! Separating adversaries and games at toy scale.

pub mod collision;
pub mod dcrpuzz;
pub mod io;
pub mod lightning;
pub mod owp;

pub use collision::{
    collision_program, collision_via_q, distinct_probability, planted_two_to_one, CollisionAttempt, CollisionProgram,
};
pub use dcrpuzz::{
    dcrpuzz_extract, extractor_distribution, ideal_collision_distribution, random_sampler, Collision, PuzzleSampler,
};
pub use io::{
    admissible, challenge_gap, equivalent_pairs, io_advantage, io_game, punctured_challenge_law, punctured_view_law,
    IoAdversary, IoStrategy,
};
pub use lightning::{both_verify_rate, lightning_clone, random_scheme, CloneOutcome, LightningScheme, Verifier};
pub use owp::{
    owp_hybrid_experiment, planted_find_reports, s2_symmetry, wilson, Challenge, ExperimentRecord, Hybrid,
    OwpAdversary, OwpConfig, OwpCounts,
};
