//! Budget sweeps: error-versus-budget curves over a fixed instance.
//!
//! A sweep runs every `(algorithm, budget, repetition)` cell against a
//! fresh stochastic oracle on one fixed loss matrix and records the loss
//! gap `L[î,ĵ] − L[i⋆,j⋆]` of the returned pair against the brute-force
//! optimum, which the harness can always compute because it holds the
//! true matrix. Cells execute in parallel; determinism survives because
//! every cell's randomness is derived purely from `(master seed,
//! algorithm, budget, repetition)` and rows are emitted in sorted order
//! regardless of completion order.
//!
//! The CSV schema is one row per cell under the header
//! `algorithm,K,r,budget,rep,seed,error,queries,wall_ms`. The `wall_ms`
//! column is reserved for timing studies and always written as 0: wall
//! time is the one nondeterministic quantity in a record, and output
//! files are required to be byte-identical across reruns.

use crate::baselines::{lil_ucb, naive_uniform, pairwise_se_with_budget};
use crate::error::{Error, Result};
use crate::model::{optimal_pair, LossMatrix};
use crate::oracle::StochasticOracle;
use crate::rplans::{run_rplans_budget, DEFAULT_ROUND_CAP, DEFAULT_SPLIT};
use crate::seed::derive_seed;
use rayon::prelude::*;
use std::path::Path;

/// Failure probability handed to the SE baseline's radius schedule when it
/// runs purely under a budget.
pub const SWEEP_SE_DELTA: f64 = 0.1;

/// Algorithms a sweep can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Budgeted low-rank completion.
    RPlans,
    /// Uniform allocation over all pair-arms.
    Naive,
    /// Optimistic sampling over all pair-arms.
    LilUcb,
    /// Successive elimination over all pair-arms.
    Se,
}

impl Algorithm {
    /// The name used in CLI flags and CSV rows.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RPlans => "rplans",
            Algorithm::Naive => "naive",
            Algorithm::LilUcb => "lilucb",
            Algorithm::Se => "se",
        }
    }

    /// Parses a CLI name.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "rplans" => Ok(Algorithm::RPlans),
            "naive" => Ok(Algorithm::Naive),
            "lilucb" => Ok(Algorithm::LilUcb),
            "se" => Ok(Algorithm::Se),
            other => Err(Error::Argument(format!(
                "unknown algorithm '{other}' (expected rplans, naive, lilucb, or se)"
            ))),
        }
    }
}

/// A validated sweep plan.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Algorithms to run, in output order.
    pub algorithms: Vec<Algorithm>,
    /// Query budgets, strictly increasing.
    pub budgets: Vec<u64>,
    /// Repetitions per (algorithm, budget) cell.
    pub reps: u32,
    /// Master seed; every cell derives its own stream from it.
    pub master_seed: u64,
    /// Rank parameter handed to the structured algorithm.
    pub r: usize,
}

impl SweepConfig {
    /// Validates list shapes: nonempty algorithms, strictly increasing
    /// budgets, at least one repetition, positive rank.
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Argument("sweep needs at least one algorithm".into()));
        }
        if self.budgets.is_empty() {
            return Err(Error::Argument("sweep needs at least one budget".into()));
        }
        if self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument(format!(
                "budgets must be strictly increasing, got {:?}",
                self.budgets
            )));
        }
        if self.reps == 0 {
            return Err(Error::Argument("repetitions must be at least 1".into()));
        }
        if self.r == 0 {
            return Err(Error::Argument("rank parameter must be at least 1".into()));
        }
        Ok(())
    }
}

/// One sweep cell's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// Algorithm name as in [`Algorithm::name`].
    pub algorithm: &'static str,
    /// Items in the instance.
    pub k: usize,
    /// Rank parameter of the run.
    pub r: usize,
    /// Query budget of the cell.
    pub budget: u64,
    /// Repetition index, 0-based.
    pub rep: u32,
    /// Derived oracle seed of the cell.
    pub seed: u64,
    /// Loss gap of the returned pair against the brute-force optimum.
    pub error: f64,
    /// Oracle calls actually made (at most the budget).
    pub queries: u64,
    /// Reserved timing column; always 0 so reruns stay byte-identical.
    pub wall_ms: u64,
}

/// Runs one cell against a fresh oracle.
fn run_cell(
    l: &LossMatrix,
    algo: Algorithm,
    r: usize,
    budget: u64,
    rep: u32,
    master_seed: u64,
) -> Result<SweepRecord> {
    let seed = derive_seed(
        master_seed,
        &[algo.name(), &budget.to_string(), &rep.to_string()],
    );
    let mut oracle = StochasticOracle::from_loss(l, seed);
    let (pair, queries) = match algo {
        Algorithm::RPlans => {
            let res = run_rplans_budget(&mut oracle, r, budget, DEFAULT_SPLIT, DEFAULT_ROUND_CAP)?;
            (res.pair, res.queries)
        }
        Algorithm::Naive => {
            let res = naive_uniform(&mut oracle, budget)?;
            (res.pair, res.queries)
        }
        Algorithm::LilUcb => {
            let res = lil_ucb(&mut oracle, budget)?;
            (res.pair, res.queries)
        }
        Algorithm::Se => {
            let res = pairwise_se_with_budget(&mut oracle, 0.0, SWEEP_SE_DELTA, u64::MAX, budget)?;
            (res.pair, res.queries)
        }
    };
    let (_, _, best) = optimal_pair(l);
    let error = l.matrix().get(pair.0, pair.1) - best;
    Ok(SweepRecord {
        algorithm: algo.name(),
        k: l.side(),
        r,
        budget,
        rep,
        seed,
        error,
        queries,
        wall_ms: 0,
    })
}

/// Runs the full sweep over the instance, in parallel, and returns rows
/// sorted by (algorithm position, budget, repetition).
pub fn run_sweep(l: &LossMatrix, config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let mut cells = Vec::new();
    for (ai, &algo) in config.algorithms.iter().enumerate() {
        for &budget in &config.budgets {
            for rep in 0..config.reps {
                cells.push((ai, algo, budget, rep));
            }
        }
    }
    let mut rows: Vec<(usize, SweepRecord)> = cells
        .into_par_iter()
        .map(|(ai, algo, budget, rep)| {
            run_cell(l, algo, config.r, budget, rep, config.master_seed).map(|rec| (ai, rec))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|(ai, rec)| (*ai, rec.budget, rec.rep));
    Ok(rows.into_iter().map(|(_, rec)| rec).collect())
}

/// Exact CSV header of a sweep file.
pub const SWEEP_CSV_HEADER: &str = "algorithm,K,r,budget,rep,seed,error,queries,wall_ms";

/// Serializes records under [`SWEEP_CSV_HEADER`] with shortest-round-trip
/// floats; byte-identical across reruns of the same configuration.
pub fn write_sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            rec.algorithm,
            rec.k,
            rec.r,
            rec.budget,
            rec.rep,
            rec.seed,
            rec.error,
            rec.queries,
            rec.wall_ms
        ));
    }
    out
}

/// Writes a sweep CSV file.
pub fn save_sweep_csv(path: &Path, records: &[SweepRecord]) -> Result<()> {
    Ok(std::fs::write(path, write_sweep_csv(records))?)
}
