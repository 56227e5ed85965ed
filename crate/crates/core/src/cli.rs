//! Command-line entry point.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::gen::random_table_oracle;
use crate::oracle::bundle::{sample_bundle, BundleError, MAX_LAMBDA};
use crate::oracle::Oracle;
use crate::qstate::{statistical_distance, MAX_QUBITS, TOL};
use crate::report::{config_hash, write_rows, DemoRecord, Format, Manifest, ReportError};
use crate::seed::trial_rng;
use crate::separations::io::{
    challenge_gap, punctured_view_law, view_law_distance, MAX_CHALLENGE_LAMBDA, MAX_VIEW_LAMBDA,
};
use crate::separations::{
    both_verify_rate, collision_program, collision_via_q, equivalent_pairs, extractor_distribution,
    ideal_collision_distribution, io_advantage, io_game, owp_hybrid_experiment, planted_two_to_one, random_sampler,
    random_scheme, Challenge, CollisionAttempt, Hybrid, IoAdversary, IoStrategy, OwpAdversary, OwpConfig,
};
use crate::verify::{run_suite, SlackReport, Suite};

#[derive(Debug, Parser, Serialize)]
#[command(name = "oraclesep", version, about = "Exact toy-scale oracle separation experiments")]
pub struct Cli {
    /// Master seed; every instance seed is derived from it.
    #[arg(long, env = "ORACLESEP_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Number of instances or trials; each command has its own default.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 8, global = true)]
    pub lambda: usize,
    /// Query budget for the bounded OWP adversaries.
    #[arg(long, default_value_t = 4, global = true)]
    pub q: usize,
    /// Largest register any demo may simulate.
    #[arg(long, default_value_t = MAX_QUBITS, global = true)]
    pub qubits: usize,
    /// Write rows here and a manifest next to it, instead of to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv, global = true)]
    pub format: FormatArg,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum FormatArg {
    Csv,
    #[value(name = "json-lines", alias = "jsonl")]
    JsonLines,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::JsonLines => Format::JsonLines,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
pub enum SuiteArg {
    All,
    Ow2h,
    Distances,
    Bbbv,
    Markov,
    Abcd,
    Punc,
    Qcol,
    Csto,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum DemoArg {
    Dcrpuzz,
    Lightning,
    PdqpCollision,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum HybridArg {
    S1,
    S2,
    S3,
    S4,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum AdversaryArg {
    Random,
    Echo,
    Exhaustive,
    Bounded,
    EvalSearch,
    EvalProbe,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Check lemma and bound instances; one row per check.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
    },
    /// Run a separating adversary on toy instances.
    Demo {
        #[arg(value_enum)]
        which: DemoArg,
    },
    /// The inversion game against the hybrid bundles.
    Owp {
        /// Hybrid to run; all four when omitted.
        #[arg(long, value_enum)]
        hybrid: Option<HybridArg>,
        #[arg(long, value_enum, default_value_t = AdversaryArg::Random)]
        adversary: AdversaryArg,
        /// Pass the adversary's output through Find.
        #[arg(long)]
        find: bool,
    },
    /// The iO game on functionally equivalent program pairs.
    IoGame,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("qubit budget {0} exceeds the simulator limit {MAX_QUBITS}")]
    Budget(usize),
    #[error("{what} needs λ ≤ {max}, got {got}")]
    Lambda { what: &'static str, max: usize, got: usize },
    #[error("demo instance needs {needed} qubits, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{0}")]
    Run(String),
}

/// Rows of one command plus how many exact checks failed.
struct Output {
    rows: Rows,
    failures: usize,
}

enum Rows {
    Slack(Vec<SlackReport>),
    Demo(Vec<DemoRecord>),
    Experiment(Vec<crate::separations::ExperimentRecord>),
}

impl Rows {
    fn len(&self) -> usize {
        match self {
            Rows::Slack(r) => r.len(),
            Rows::Demo(r) => r.len(),
            Rows::Experiment(r) => r.len(),
        }
    }

    fn write<W: Write>(&self, format: Format, w: W) -> Result<(), ReportError> {
        match self {
            Rows::Slack(r) => write_rows(r, format, w),
            Rows::Demo(r) => write_rows(r, format, w),
            Rows::Experiment(r) => write_rows(r, format, w),
        }
    }
}

fn exact_row(demo: &str, instance: usize, seed: u64, metric: &str, value: f64, bound: f64) -> DemoRecord {
    DemoRecord {
        demo: demo.into(),
        instance,
        seed,
        metric: metric.into(),
        value,
        bound,
        exact: true,
        pass: value <= bound + TOL,
    }
}

fn sampled_row(demo: &str, instance: usize, seed: u64, metric: &str, value: f64, bound: f64) -> DemoRecord {
    DemoRecord {
        demo: demo.into(),
        instance,
        seed,
        metric: metric.into(),
        value,
        bound,
        exact: false,
        pass: value <= bound,
    }
}

fn verify(cli: &Cli, suite: SuiteArg) -> Output {
    let suites: Vec<Suite> = match suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Ow2h => vec![Suite::Ow2h],
        SuiteArg::Distances => vec![Suite::Distances],
        SuiteArg::Bbbv => vec![Suite::Bbbv],
        SuiteArg::Markov => vec![Suite::Markov],
        SuiteArg::Abcd => vec![Suite::Abcd],
        SuiteArg::Punc => vec![Suite::Punc],
        SuiteArg::Qcol => vec![Suite::Qcol],
        SuiteArg::Csto => vec![Suite::Csto],
    };
    let rows: Vec<SlackReport> =
        suites.into_iter().flat_map(|s| run_suite(s, cli.seed, cli.trials.unwrap_or(s.default_trials()))).collect();
    let failures = rows.iter().filter(|r| !r.pass).count();
    Output { rows: Rows::Slack(rows), failures }
}

fn demo(cli: &Cli, which: DemoArg) -> Result<Output, CliError> {
    let mut rows = Vec::new();
    match which {
        DemoArg::Dcrpuzz => {
            for i in 0..cli.trials.unwrap_or(20) {
                let mut rng = trial_rng(cli.seed, "dcrpuzz", i as u64);
                let sampler = random_sampler(&mut rng);
                let o = random_table_oracle(1, 1, &mut rng);
                let needed = sampler.puzz.len() + 2 * (sampler.ans.len() + sampler.junk.len());
                if needed > cli.qubits {
                    return Err(CliError::BudgetExceeded { needed, budget: cli.qubits });
                }
                let ext = extractor_distribution(&sampler, &o).ok_or_else(|| CliError::Run("Col answered ⊥".into()))?;
                let ideal = ideal_collision_distribution(&sampler, &o).map_err(|e| CliError::Run(e.to_string()))?;
                rows.push(exact_row("dcrpuzz", i, cli.seed, "sd", statistical_distance(&ext, &ideal), 0.0));
            }
        }
        DemoArg::Lightning => {
            for i in 0..cli.trials.unwrap_or(20) {
                let mut rng = trial_rng(cli.seed, "lightning", i as u64);
                let scheme = random_scheme(&mut rng);
                let o = random_table_oracle(1, 1, &mut rng);
                let needed = scheme.serial_len() + 2 * scheme.bolt_len();
                if needed > cli.qubits {
                    return Err(CliError::BudgetExceeded { needed, budget: cli.qubits });
                }
                let err = |e: crate::separations::lightning::LightningError| CliError::Run(e.to_string());
                let ver = scheme.verifier(&o).map_err(err)?;
                let both = both_verify_rate(&scheme, &ver, &o).map_err(err)?;
                rows.push(exact_row("lightning", i, cli.seed, "rate-gap", (both - ver.generator_rate()).abs(), 0.0));
            }
        }
        DemoArg::PdqpCollision => {
            let n = 3;
            if 3 * n > cli.qubits {
                return Err(CliError::BudgetExceeded { needed: 3 * n, budget: cli.qubits });
            }
            let mut rng = trial_rng(cli.seed, "pdqp-collision", 0);
            let f = planted_two_to_one(n, &mut rng);
            let prog = collision_program(&f);
            let trials = cli.trials.unwrap_or(10_000);
            let mut hits = 0usize;
            for _ in 0..trials {
                match collision_via_q(&prog, &mut rng).map_err(|e| CliError::Run(e.to_string()))? {
                    CollisionAttempt::Distinct(a, b) => {
                        if f.query(&a) != f.query(&b) {
                            return Err(CliError::Run(format!("{a} and {b} do not collide")));
                        }
                        hits += 1;
                    }
                    CollisionAttempt::Same(_) => {}
                }
            }
            let rate = hits as f64 / trials.max(1) as f64;
            let sigma = (0.25 / trials.max(1) as f64).sqrt();
            rows.push(sampled_row(
                "pdqp-collision",
                0,
                cli.seed,
                "distinct-rate-deviation",
                (rate - 0.5).abs(),
                3.0 * sigma,
            ));
        }
    }
    let failures = rows.iter().filter(|r| r.exact && !r.pass).count();
    Ok(Output { rows: Rows::Demo(rows), failures })
}

fn owp(cli: &Cli, hybrid: Option<HybridArg>, adversary: AdversaryArg, find: bool) -> Result<Output, CliError> {
    let hybrids: Vec<Hybrid> = match hybrid {
        None => Hybrid::ALL.to_vec(),
        Some(HybridArg::S1) => vec![Hybrid::S1],
        Some(HybridArg::S2) => vec![Hybrid::S2],
        Some(HybridArg::S3) => vec![Hybrid::S3],
        Some(HybridArg::S4) => vec![Hybrid::S4],
    };
    let adversary = match adversary {
        AdversaryArg::Random => OwpAdversary::RandomGuess,
        AdversaryArg::Echo => OwpAdversary::Echo,
        AdversaryArg::Exhaustive => OwpAdversary::Exhaustive,
        AdversaryArg::Bounded => OwpAdversary::BoundedSearch(cli.q),
        AdversaryArg::EvalSearch => OwpAdversary::EvalSearch(cli.q),
        AdversaryArg::EvalProbe => OwpAdversary::EvalProbe,
    };
    let mut rows = Vec::new();
    for h in hybrids {
        let cfg = OwpConfig {
            lambda: cli.lambda,
            hybrid: h,
            adversary,
            trials: cli.trials.unwrap_or(10_000),
            seed: cli.seed,
            find_augmented: find,
            challenge: Challenge::Default,
        };
        rows.extend(owp_hybrid_experiment(&cfg)?.records(&cfg));
    }
    Ok(Output { rows: Rows::Experiment(rows), failures: 0 })
}

fn io(cli: &Cli) -> Result<Output, CliError> {
    if cli.lambda > 8 {
        return Err(CliError::Lambda { what: "io-game", max: 8, got: cli.lambda });
    }
    let bundle = sample_bundle(cli.lambda, cli.seed)?;
    let pairs = equivalent_pairs(&bundle);
    let mut rows = Vec::new();
    let trials = cli.trials.unwrap_or(10_000);
    if let Some(&(c0, c1)) = pairs.first() {
        for (k, strategy) in [IoStrategy::RandomGuess, IoStrategy::LowBit, IoStrategy::Invert].into_iter().enumerate() {
            let adv = IoAdversary { c0, c1, strategy };
            let (a, sigma) = io_advantage(&adv, &bundle, trials, cli.seed).expect("admissible pair");
            let metric = match strategy {
                IoStrategy::RandomGuess => "advantage-random",
                IoStrategy::LowBit => "advantage-low-bit",
                IoStrategy::Invert => "advantage-invert-unpunctured",
            };
            let bound = if strategy == IoStrategy::Invert { 1.0 } else { 3.0 * sigma };
            rows.push(sampled_row("io-game", k, cli.seed, metric, a.abs(), bound));
        }
    }
    let mut rng = trial_rng(cli.seed, "io-bot", 0);
    let bad = IoAdversary {
        c0: BitString::zeros(cli.lambda),
        c1: crate::circuit::classical::ClassicalProgram::encode(
            &[crate::circuit::classical::ClassicalOp::Not],
            cli.lambda,
        )
        .map(|p| p.bits())
        .unwrap_or(BitString::zeros(cli.lambda)),
        strategy: IoStrategy::RandomGuess,
    };
    let bot = io_game(false, &bad, &bundle, &mut rng).is_none() as u8 as f64;
    rows.push(exact_row("io-game", 0, cli.seed, "inequivalent-not-bot", 1.0 - bot, 0.0));
    if cli.lambda <= MAX_CHALLENGE_LAMBDA {
        for (i, (c0, c1)) in pairs.iter().enumerate() {
            let gap = challenge_gap(&bundle, c0, c1).map_err(|e| CliError::Run(e.to_string()))?;
            rows.push(exact_row("io-game", i, cli.seed, "challenge-sd", gap, 0.0));
            if cli.lambda <= MAX_VIEW_LAMBDA {
                let d = view_law_distance(&punctured_view_law(&bundle, c0), &punctured_view_law(&bundle, c1));
                rows.push(exact_row("io-game", i, cli.seed, "view-gap", d, 0.0));
            }
        }
    }
    let failures = rows.iter().filter(|r| r.exact && !r.pass).count();
    Ok(Output { rows: Rows::Demo(rows), failures })
}

/// Runs one command; returns the number of failed exact checks.
pub fn run(cli: &Cli) -> Result<usize, CliError> {
    if cli.qubits > MAX_QUBITS {
        return Err(CliError::Budget(cli.qubits));
    }
    if cli.lambda == 0 || cli.lambda > MAX_LAMBDA {
        return Err(CliError::Lambda { what: "the bundle", max: MAX_LAMBDA, got: cli.lambda });
    }
    if let Some(j) = cli.jobs {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let out = match cli.command {
        Command::Verify { suite } => verify(cli, suite),
        Command::Demo { which } => demo(cli, which)?,
        Command::Owp { hybrid, adversary, find } => owp(cli, hybrid, adversary, find)?,
        Command::IoGame => io(cli)?,
    };
    let format = Format::from(cli.format);
    match &cli.out {
        Some(path) => {
            out.rows.write(format, BufWriter::new(File::create(path)?))?;
            let config = serde_json::to_value(cli).expect("config serializes");
            let mut config = config;
            if let Some(m) = config.as_object_mut() {
                m.remove("out");
                m.remove("jobs");
            }
            let manifest = Manifest {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
                seed: cli.seed,
                config_hash: config_hash(&config),
                config,
                rows: out.rows.len(),
                failures: out.failures,
            };
            let mut mpath = path.clone().into_os_string();
            mpath.push(".manifest.json");
            let mut w = BufWriter::new(File::create(PathBuf::from(mpath))?);
            serde_json::to_writer_pretty(&mut w, &manifest).map_err(ReportError::from)?;
            w.write_all(b"\n")?;
        }
        None => out.rows.write(format, io::stdout().lock())?,
    }
    eprintln!("{} rows, {} exact failures", out.rows.len(), out.failures);
    Ok(out.failures)
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
