//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.

use std::io::Write;
use std::time::{Duration, Instant};

use oraclesep::bits::BitString;
use oraclesep::compressed::average_acceptance;
use oraclesep::gen::random_table_oracle;
use oraclesep::oracle::{sample_bundle, Oracle};
use oraclesep::qstate::statistical_distance;
use oraclesep::seed::trial_rng;
use oraclesep::separations::io::{punctured_view_law, view_law_distance, MAX_CHALLENGE_LAMBDA, MAX_VIEW_LAMBDA};
use oraclesep::separations::owp::Challenge;
use oraclesep::separations::{
    both_verify_rate, challenge_gap, collision_program, collision_via_q, equivalent_pairs, extractor_distribution,
    ideal_collision_distribution, io_game, owp_hybrid_experiment, planted_find_reports, planted_two_to_one,
    random_sampler, random_scheme, s2_symmetry, CollisionAttempt, Hybrid, IoAdversary, IoStrategy, OwpAdversary,
    OwpConfig,
};
use oraclesep::verify::{csto_corpus, run_suite, SlackReport, Suite};

const MASTER: u64 = 7;
const TOL: f64 = 1e-9;

/// Sum of the exact acceptance probabilities of the 50 corpus instances,
/// by enumeration over every oracle draw.
const CSTO_EXACT_SUM: f64 = 21.504596492336;
/// Instances out of 1000 at `MASTER` where `√(T·ε)` is exceeded.
const BBBV_STATED_FAILURES: usize = 49;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn violations(reps: &[SlackReport], id: &str) -> usize {
    reps.iter().filter(|r| r.lemma_id == id && (!r.pass || r.slack < -TOL)).count()
}

fn count(reps: &[SlackReport], id: &str) -> usize {
    reps.iter().filter(|r| r.lemma_id == id).count()
}

fn suite_outcome(reps: &[SlackReport], ids: &[(&str, usize)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(id, n) in ids {
        let (got, bad) = (count(reps, id), violations(reps, id));
        pass &= got == n && bad == 0;
        parts.push(format!("{id} {}/{got}", got - bad));
    }
    outcome(pass, parts.join(", "))
}

fn csto() -> Outcome {
    let corpus = csto_corpus(50);
    let reps = run_suite(Suite::Csto, MASTER, 50);
    let sum: f64 = corpus.iter().map(|c| average_acceptance(&c.circuit, &c.dist, c.accept).unwrap()).sum();
    let worst = reps.iter().map(|r| r.lhs).fold(0.0, f64::max);
    let small = corpus.iter().all(|c| c.circuit.oracle_calls() <= 3 && c.dist.in_len() <= 2 && c.dist.out_len() <= 2);
    outcome(
        small && violations(&reps, "csto") == 0 && (sum - CSTO_EXACT_SUM).abs() <= TOL,
        format!("max |compressed - exact| = {worst:.1e}, exact sum {sum:.9}"),
    )
}

fn abcd() -> Outcome {
    suite_outcome(&run_suite(Suite::Abcd, MASTER, 1000), &[("abcd", 1000)])
}

fn ow2h() -> Outcome {
    suite_outcome(&run_suite(Suite::Ow2h, MASTER, 100), &[("ow2h-comp", 100), ("ow2h-dist", 100)])
}

fn distances() -> Outcome {
    suite_outcome(
        &run_suite(Suite::Distances, MASTER, 1000),
        &[("td-le-ed", 1000), ("td-ge-phase-ed", 1000), ("ed-le-sd", 1000)],
    )
}

fn bbbv() -> Outcome {
    let reps = run_suite(Suite::Bbbv, MASTER, 1000);
    let stated = violations(&reps, "bbbv");
    let doubled = violations(&reps, "bbbv-2x");
    let worst = reps.iter().filter(|r| r.lemma_id == "bbbv" && r.rhs > 0.0).map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
    // The stated bound is expected to fail; the test asserts the known count.
    assert_eq!(stated, BBBV_STATED_FAILURES, "stated bound violation count changed");
    assert_eq!(doubled, 0, "2√(Tε) bound violated");
    outcome(
        stated == 0,
        format!("√(Tε) violated {stated}/1000 (worst ratio {worst:.3}); 2√(Tε) violated {doubled}/1000"),
    )
}

fn markov() -> Outcome {
    suite_outcome(&run_suite(Suite::Markov, MASTER, 100), &[("markov-tv", 100)])
}

fn dcrpuzz() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let mut rng = trial_rng(MASTER, "dcrpuzz", i);
        let sampler = random_sampler(&mut rng);
        let o = random_table_oracle(1, 1, &mut rng);
        assert!(sampler.puzz.len() <= 3 && sampler.ans.len() + sampler.junk.len() <= 3 + 2);
        let ext = extractor_distribution(&sampler, &o).expect("Col answers");
        let ideal = ideal_collision_distribution(&sampler, &o).unwrap();
        worst = worst.max(statistical_distance(&ext, &ideal));
    }
    outcome(worst <= TOL, format!("max SD over 20 samplers = {worst:.1e}"))
}

fn lightning() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let mut rng = trial_rng(MASTER, "lightning", i);
        let scheme = random_scheme(&mut rng);
        let o = random_table_oracle(1, 1, &mut rng);
        let ver = scheme.verifier(&o).unwrap();
        let both = both_verify_rate(&scheme, &ver, &o).unwrap();
        worst = worst.max((both - ver.generator_rate()).abs());
    }
    outcome(worst <= TOL, format!("max |both - generator| over 20 schemes = {worst:.1e}"))
}

fn qcol() -> Outcome {
    suite_outcome(&run_suite(Suite::Qcol, MASTER, 1000), &[("qcol-involution", 1000), ("qcol-conjugate", 1000)])
}

fn owp() -> Outcome {
    let (lambda, trials) = (8, 100_000);
    let cfg = OwpConfig {
        lambda,
        hybrid: Hybrid::S1,
        adversary: OwpAdversary::RandomGuess,
        trials,
        seed: MASTER,
        find_augmented: false,
        challenge: Challenge::Default,
    };
    let counts = owp_hybrid_experiment(&cfg).unwrap();
    let p = 1.0 / 256.0;
    let rate = counts.hit_x as f64 / trials as f64;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let guess_ok = (rate - p).abs() <= 3.0 * sigma;

    let sym = s2_symmetry(lambda, OwpAdversary::Echo, trials, MASTER).unwrap();
    let sym_ok = sym.diff.abs() <= 3.0 * sym.sigma;

    let bundle = sample_bundle(lambda, MASTER).unwrap();
    let finds = planted_find_reports(&bundle, 20, MASTER);
    let find_ok = !finds.is_empty() && finds.iter().all(|r| r.pass);
    outcome(
        guess_ok && sym_ok && find_ok,
        format!(
            "guess rate {rate:.5} vs {p:.5} ± {:.5}; S2 diff {:.5} ± {:.5}; Find {} planted checks",
            3.0 * sigma,
            sym.diff,
            3.0 * sym.sigma,
            finds.len()
        ),
    )
}

fn io() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut view_worst: f64 = 0.0;
    let (mut pairs, mut bots, mut inequivalent) = (0, 0, 0);
    for lambda in 1..=MAX_CHALLENGE_LAMBDA {
        let bundle = sample_bundle(lambda, MASTER).unwrap();
        let eq = equivalent_pairs(&bundle);
        for (c0, c1) in &eq {
            worst = worst.max(challenge_gap(&bundle, c0, c1).unwrap());
            if lambda <= MAX_VIEW_LAMBDA {
                view_worst = view_worst
                    .max(view_law_distance(&punctured_view_law(&bundle, c0), &punctured_view_law(&bundle, c1)));
            }
        }
        pairs += eq.len();
        let mut rng = trial_rng(MASTER, "io-bot", lambda as u64);
        let progs: Vec<BitString> = BitString::all(lambda).collect();
        for (i, &c0) in progs.iter().enumerate() {
            for &c1 in &progs[i + 1..] {
                if eq.contains(&(c0.min(c1), c0.max(c1))) {
                    continue;
                }
                inequivalent += 1;
                let adv = IoAdversary { c0, c1, strategy: IoStrategy::RandomGuess };
                bots += (io_game(false, &adv, &bundle, &mut rng).is_none()
                    && io_game(true, &adv, &bundle, &mut rng).is_none()) as usize;
            }
        }
    }
    outcome(
        pairs > 0 && worst <= TOL && view_worst <= TOL && bots == inequivalent,
        format!(
            "{pairs} equivalent pairs: max challenge SD {worst:.1e}, max view gap {view_worst:.1e}; ⊥ on {bots}/{inequivalent} inequivalent"
        ),
    )
}

fn collision() -> Outcome {
    let mut rng = trial_rng(MASTER, "pdqp-collision", 0);
    let f = planted_two_to_one(3, &mut rng);
    let prog = collision_program(&f);
    let trials = 10_000;
    let mut hits = 0;
    for _ in 0..trials {
        if let CollisionAttempt::Distinct(a, b) = collision_via_q(&prog, &mut rng).unwrap() {
            assert_eq!(f.query(&a), f.query(&b), "{a} and {b} do not collide");
            assert_ne!(a, b);
            hits += 1;
        }
    }
    let rate = hits as f64 / trials as f64;
    let sigma = (0.25 / trials as f64).sqrt();
    outcome((rate - 0.5).abs() <= 3.0 * sigma, format!("distinct rate {rate:.4} vs 0.5 ± {:.4}", 3.0 * sigma))
}

#[test]
fn acceptance() {
    type Criterion = (usize, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        (1, "compressed oracle equivalence", 30, csto),
        (2, "abcd bound", 60, abcd),
        (3, "ow2h bounds", 120, ow2h),
        (4, "distance lemmas", 10, distances),
        (5, "bbbv", 60, bbbv),
        (6, "markov tv", 5, markov),
        (7, "dcrpuzz break", 30, dcrpuzz),
        (8, "lightning break", 30, lightning),
        (9, "qcol identities", 30, qcol),
        (10, "owp hybrids", 300, owp),
        (11, "io skeleton", 60, io),
        (12, "collision demo", 10, collision),
    ];
    // Written to the raw handle so the table shows without --nocapture.
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout).unwrap();
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(limit);
        let pass = out.pass && in_time;
        writeln!(
            stdout,
            "{} {id:>2} {name}: {} [{:.2}s / {limit}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        )
        .unwrap();
        if !pass {
            failed.push(id);
        }
    }
    // Criterion 5 fails by a known margin; everything else must pass.
    assert_eq!(failed, vec![5], "unexpected acceptance failures");
}
