//! Command-line front end for the pair-recommendation toolkit: instance
//! generation, deterministic and stochastic completion, pair-arm
//! baselines, budget sweeps, concentration-bound validation, and rating
//! ingestion.
//!
//! File-producing commands write only to their `--out` (and `--stats`)
//! paths; validation commands print a JSON report to stdout. Every
//! command is deterministic given its flags, so reruns are byte-identical.
//!
//! Exit codes: 0 on success, 2 for argument errors (flag parsing included),
//! 3 for data, format, and I/O failures.

use clap::{Args, Parser, Subcommand, ValueEnum};
use plans_core::baselines::{lil_ucb, naive_uniform, pairwise_se_with_budget, BaselineResult};
use plans_core::io;
use plans_core::plans::{recommend_pair, run_plans, DEFAULT_SIGMA_THRESH};
use plans_core::rplans::{run_rplans, run_rplans_budget, DEFAULT_ROUND_CAP, DEFAULT_SPLIT};
use plans_core::sweep::{run_sweep, save_sweep_csv, Algorithm, SweepConfig, SWEEP_SE_DELTA};
use plans_core::synth::{gen_model, gen_synthetic, ingest_ratings};
use plans_core::validate::{validate_bernstein, validate_nystrom_noise, validate_se};
use plans_core::{DeterministicOracle, Error, Result, StochasticOracle};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "plans", version, about = "Active pair recommendation via low-rank completion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic population model or its loss matrix.
    Gen(GenArgs),
    /// Complete a loss matrix from exact entry queries and recommend a pair.
    Plans(PlansArgs),
    /// Estimate a completion from Bernoulli entry draws and recommend a pair.
    Rplans(RplansArgs),
    /// Run one pair-arm baseline under a total query budget.
    Baseline(BaselineArgs),
    /// Run an error-vs-budget sweep and write one CSV row per repetition.
    Sweep(SweepArgs),
    /// Measure Monte Carlo coverage of the matrix concentration radius.
    ValidateBernstein(ValidateBernsteinArgs),
    /// Measure the elimination race's accuracy on a frozen benchmark.
    ValidateSe(ValidateSeArgs),
    /// Measure how completion error decays with samples per entry.
    ValidateNystrom(ValidateNystromArgs),
    /// Build a population model from a rating table and group labels.
    Ingest(IngestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    /// Population model JSON (mixture weights and like probabilities).
    Model,
    /// Loss matrix CSV from the normalized random-factor generator.
    Matrix,
}

#[derive(Args)]
struct GenArgs {
    /// Number of items.
    #[arg(long)]
    k: usize,
    /// Number of latent groups (bounds the matrix rank).
    #[arg(long)]
    r: usize,
    /// Generator seed.
    #[arg(long)]
    seed: u64,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    /// What to write.
    #[arg(long, value_enum, default_value_t = GenFormat::Matrix)]
    format: GenFormat,
}

#[derive(Args)]
struct PlansArgs {
    /// Loss matrix CSV to complete.
    #[arg(long)]
    matrix: PathBuf,
    /// Rank cap; omit to let the acceptance test discover the rank.
    #[arg(long)]
    r: Option<usize>,
    /// Acceptance threshold on the smallest singular value.
    #[arg(long, default_value_t = DEFAULT_SIGMA_THRESH)]
    sigma_thresh: f64,
    /// Path for the completed matrix CSV.
    #[arg(long)]
    out: PathBuf,
    /// Path for the run report JSON.
    #[arg(long)]
    stats: PathBuf,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["eps", "budget"])))]
struct RplansArgs {
    /// Loss matrix CSV defining the Bernoulli oracle.
    #[arg(long)]
    matrix: PathBuf,
    /// Number of columns to select (the rank bound).
    #[arg(long)]
    r: usize,
    /// Target max-norm accuracy; pairs with --delta.
    #[arg(long, requires = "delta")]
    eps: Option<f64>,
    /// Failure probability for the accuracy mode.
    #[arg(long, requires = "eps", conflicts_with = "budget")]
    delta: Option<f64>,
    /// Hard total query budget (the alternative to --eps/--delta).
    #[arg(long)]
    budget: Option<u64>,
    /// Budget fraction spent on column selection.
    #[arg(long, requires = "budget")]
    split: Option<f64>,
    /// Oracle seed.
    #[arg(long)]
    seed: u64,
    /// Path for the result JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineAlgo {
    /// Uniform budget allocation over all pair-arms.
    Naive,
    /// Best-arm identification with iterated-logarithm radii.
    Lilucb,
    /// Pairwise successive elimination under the budget.
    Se,
}

#[derive(Args)]
struct BaselineArgs {
    /// Which baseline to run.
    #[arg(long, value_enum)]
    algo: BaselineAlgo,
    /// Loss matrix CSV defining the Bernoulli oracle.
    #[arg(long)]
    matrix: PathBuf,
    /// Total query budget.
    #[arg(long)]
    budget: u64,
    /// Oracle seed.
    #[arg(long)]
    seed: u64,
    /// Path for the result JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Loss matrix CSV defining the Bernoulli oracle for every cell.
    #[arg(long)]
    matrix: PathBuf,
    /// Rank parameter handed to the structured algorithm.
    #[arg(long)]
    r: usize,
    /// Comma-separated algorithm names (rplans, naive, lilucb, se).
    #[arg(long, value_delimiter = ',', required = true)]
    algos: Vec<String>,
    /// Comma-separated query budgets, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    budgets: Vec<u64>,
    /// Repetitions per (algorithm, budget) cell.
    #[arg(long)]
    reps: u32,
    /// Master seed; every cell derives its own stream.
    #[arg(long)]
    seed: u64,
    /// Path for the records CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateBernsteinArgs {
    /// Side of the random probability matrix.
    #[arg(long)]
    p: usize,
    /// Bernoulli draws per matrix entry.
    #[arg(long)]
    n: u64,
    /// Failure probability the radius is evaluated at.
    #[arg(long)]
    delta: f64,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: u32,
    /// Experiment seed.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct ValidateSeArgs {
    /// Per-trial failure probability of the race.
    #[arg(long)]
    delta: f64,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: u32,
    /// Experiment seed.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct ValidateNystromArgs {
    /// Number of items in the fixed synthetic instance.
    #[arg(long)]
    k: usize,
    /// Rank of the fixed synthetic instance.
    #[arg(long)]
    r: usize,
    /// Comma-separated per-entry sample counts, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<u64>,
    /// Monte Carlo trials per sample count.
    #[arg(long)]
    trials: u32,
    /// Experiment seed.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct IngestArgs {
    /// Binary users-by-items rating CSV.
    #[arg(long)]
    ratings: PathBuf,
    /// Group label file, one label per user line.
    #[arg(long)]
    groups: PathBuf,
    /// Path for the model JSON.
    #[arg(long)]
    out: PathBuf,
}

/// Report written by the deterministic completion command.
#[derive(Serialize)]
struct PlansReport {
    pair: [usize; 2],
    value_hat: f64,
    queries: u64,
    selected: Vec<usize>,
    decisions: Vec<DecisionRow>,
}

/// One acceptance decision from the column scan.
#[derive(Serialize)]
struct DecisionRow {
    column: usize,
    sigma_min: f64,
    accepted: bool,
}

/// Result JSON of the stochastic completion command. The `m1`/`m2`
/// targets and the cap flag are recorded so capped runs are identifiable
/// from their output alone.
#[derive(Serialize)]
struct RplansReport {
    pair: [usize; 2],
    value_hat: f64,
    queries: u64,
    selected: Vec<usize>,
    seed: u64,
    m1: u64,
    m2: u64,
    cap_hit: bool,
}

/// Result JSON of the baseline command.
#[derive(Serialize)]
struct BaselineReport {
    pair: [usize; 2],
    value_hat: f64,
    queries: u64,
    seed: u64,
}

/// Stdout report of the concentration-coverage command.
#[derive(Serialize)]
struct BernsteinOut {
    radius: f64,
    trials: u32,
    spectral_violations: u32,
    sigma_violations: u32,
    weyl_violations: u32,
    spectral_fraction: f64,
    sigma_fraction: f64,
}

/// Stdout report of the elimination-race command.
#[derive(Serialize)]
struct SeOut {
    trials: u32,
    correct: u32,
    expected: usize,
    sigma_mins: Vec<(usize, f64)>,
}

/// Stdout report of the noise-scaling command.
#[derive(Serialize)]
struct NystromOut {
    selected: Vec<usize>,
    medians: Vec<(u64, f64)>,
    slope: f64,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail") + "\n"
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    Ok(std::fs::write(path, text)?)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    match args.format {
        GenFormat::Model => io::save_model(&args.out, &gen_model(args.k, args.r, args.seed)?),
        GenFormat::Matrix => io::save_matrix(&args.out, &gen_synthetic(args.k, args.r, args.seed)?),
    }
}

fn cmd_plans(args: PlansArgs) -> Result<()> {
    let l = io::load_matrix(&args.matrix)?;
    let mut oracle = DeterministicOracle::new(&l);
    let result = run_plans(&mut oracle, args.r, args.sigma_thresh)?;
    let (i, j, value) = recommend_pair(&result);
    io::save_raw_matrix(&args.out, &result.l_hat)?;
    let report = PlansReport {
        pair: [i, j],
        value_hat: value,
        queries: result.queries,
        selected: result.selected.as_slice().to_vec(),
        decisions: result
            .decisions
            .iter()
            .map(|d| DecisionRow { column: d.column, sigma_min: d.sigma_min, accepted: d.accepted })
            .collect(),
    };
    write_text(&args.stats, &to_json(&report))
}

fn cmd_rplans(args: RplansArgs) -> Result<()> {
    let l = io::load_matrix(&args.matrix)?;
    let mut oracle = StochasticOracle::from_loss(&l, args.seed);
    let result = match (args.eps, args.budget) {
        (Some(eps), None) => {
            let delta = args.delta.expect("flag parsing pairs --eps with --delta");
            run_rplans(&mut oracle, args.r, eps, delta, DEFAULT_ROUND_CAP)?
        }
        (None, Some(budget)) => {
            let split = args.split.unwrap_or(DEFAULT_SPLIT);
            run_rplans_budget(&mut oracle, args.r, budget, split, DEFAULT_ROUND_CAP)?
        }
        _ => unreachable!("flag parsing admits exactly one mode"),
    };
    let report = RplansReport {
        pair: [result.pair.0, result.pair.1],
        value_hat: result.value_hat,
        queries: result.queries,
        selected: result.factors.selected.as_slice().to_vec(),
        seed: args.seed,
        m1: result.m1,
        m2: result.m2,
        cap_hit: result.cap_hit,
    };
    write_text(&args.out, &to_json(&report))
}

fn cmd_baseline(args: BaselineArgs) -> Result<()> {
    let l = io::load_matrix(&args.matrix)?;
    let mut oracle = StochasticOracle::from_loss(&l, args.seed);
    let result: BaselineResult = match args.algo {
        BaselineAlgo::Naive => naive_uniform(&mut oracle, args.budget)?,
        BaselineAlgo::Lilucb => lil_ucb(&mut oracle, args.budget)?,
        // eps = 0 disables the accuracy stop; the budget and elimination
        // are the only exits, matching the sweep's configuration.
        BaselineAlgo::Se => {
            pairwise_se_with_budget(&mut oracle, 0.0, SWEEP_SE_DELTA, u64::MAX, args.budget)?
        }
    };
    let report = BaselineReport {
        pair: [result.pair.0, result.pair.1],
        value_hat: result.value_hat,
        queries: result.queries,
        seed: args.seed,
    };
    write_text(&args.out, &to_json(&report))
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let l = io::load_matrix(&args.matrix)?;
    let algorithms =
        args.algos.iter().map(|s| Algorithm::parse(s)).collect::<Result<Vec<Algorithm>>>()?;
    let config = SweepConfig {
        algorithms,
        budgets: args.budgets,
        reps: args.reps,
        master_seed: args.seed,
        r: args.r,
    };
    let records = run_sweep(&l, &config)?;
    save_sweep_csv(&args.out, &records)
}

fn cmd_validate_bernstein(args: ValidateBernsteinArgs) -> Result<()> {
    let report = validate_bernstein(args.p, args.n, args.delta, args.trials, args.seed)?;
    let out = BernsteinOut {
        radius: report.radius,
        trials: report.trials,
        spectral_violations: report.spectral_violations,
        sigma_violations: report.sigma_violations,
        weyl_violations: report.weyl_violations,
        spectral_fraction: report.spectral_fraction(),
        sigma_fraction: report.sigma_fraction(),
    };
    print!("{}", to_json(&out));
    Ok(())
}

fn cmd_validate_se(args: ValidateSeArgs) -> Result<()> {
    let report = validate_se(args.delta, args.trials, args.seed)?;
    let out = SeOut {
        trials: report.trials,
        correct: report.correct,
        expected: report.expected,
        sigma_mins: report.sigma_mins,
    };
    print!("{}", to_json(&out));
    Ok(())
}

fn cmd_validate_nystrom(args: ValidateNystromArgs) -> Result<()> {
    let report = validate_nystrom_noise(args.k, args.r, &args.m, args.trials, args.seed)?;
    let out =
        NystromOut { selected: report.selected, medians: report.medians, slope: report.slope };
    print!("{}", to_json(&out));
    Ok(())
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let ratings = io::load_ratings(&args.ratings)?;
    let groups = io::load_groups(&args.groups)?;
    let model = ingest_ratings(&ratings, &groups)?;
    io::save_model(&args.out, &model)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Plans(args) => cmd_plans(args),
        Command::Rplans(args) => cmd_rplans(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::ValidateBernstein(args) => cmd_validate_bernstein(args),
        Command::ValidateSe(args) => cmd_validate_se(args),
        Command::ValidateNystrom(args) => cmd_validate_nystrom(args),
        Command::Ingest(args) => cmd_ingest(args),
    }
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(match e {
            Error::Argument(_) => 2,
            _ => 3,
        });
    }
}
