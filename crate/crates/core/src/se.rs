//! Successive elimination over candidate principal submatrices.
//!
//! # Setting
//!
//! A set of already-selected columns defines a base index set; each remaining
//! column index `i` is a candidate, and extending the base set by `i` yields
//! a square principal submatrix `A_i`. The winner is the candidate whose
//! submatrix has the largest smallest singular value, the most
//! independent extension. Entries are only observable through Bernoulli
//! draws, so the contest runs as successive elimination: sample every
//! surviving candidate's entries once per round, estimate each `A_i`,
//! and eliminate candidates whose σ_min is provably below the leader's.
//!
//! # Confidence radius
//!
//! For an entrywise-Bernoulli estimate `P̂` of a p×p matrix `P` with
//! `n_{i,j}` samples per entry, a matrix Bernstein bound gives, with
//! probability at least 1 − δ,
//!
//! ```text
//! ‖P̂ − P‖₂ ≤ 2·log(2p/δ) / (3·min n_{i,j})
//!            + sqrt( (log(2p/δ)/2) · Σ_{i,j} 1/n_{i,j} )
//! ```
//!
//! with the sum over all p² ordered entries (the estimate is symmetric, so
//! `n_{j,i} = n_{i,j}`). Since `|σ_min(P̂) − σ_min(P)| ≤ ‖P̂ − P‖₂` (Weyl),
//! the same radius bounds the σ_min estimation error, which is exactly what
//! the elimination rule needs. Per-round failure probabilities follow the
//! schedule `δ_t = 6δ/(π² m t²)`, whose sum over all rounds and candidates
//! stays below δ.
//!
//! # Sampling discipline
//!
//! All candidate submatrices share the base-set block. Those shared entries
//! are sampled once per round and the samples are shared across candidates;
//! only the extension row/column and the candidate diagonal are sampled per
//! candidate. A mandatory `round_cap` handles tied instances, which would
//! otherwise never separate; on cap the empirical leader wins, ties broken
//! toward the smallest column index.

use crate::error::{Error, Result};
use crate::matrix::{sigma_min, IndexSet, Matrix};
use crate::oracle::StochasticOracle;

/// Counts and sums of binary samples for the entries of a symmetric p×p
/// matrix, stored per unordered entry.
#[derive(Debug, Clone)]
pub struct SampleTable {
    side: usize,
    counts: Vec<u64>,
    sums: Vec<u64>,
}

impl SampleTable {
    pub fn new(side: usize) -> Self {
        assert!(side > 0, "sample table needs a positive side");
        let slots = side * (side + 1) / 2;
        Self { side, counts: vec![0; slots], sums: vec![0; slots] }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        assert!(i < self.side && j < self.side, "entry ({i},{j}) out of range");
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        lo * (2 * self.side - lo + 1) / 2 + (hi - lo)
    }

    /// Records one binary sample for the unordered entry `{i, j}`.
    pub fn record(&mut self, i: usize, j: usize, sample: u8) {
        debug_assert!(sample <= 1, "samples are binary");
        let s = self.slot(i, j);
        self.counts[s] += 1;
        self.sums[s] += u64::from(sample);
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[self.slot(i, j)]
    }

    pub fn sum(&self, i: usize, j: usize) -> u64 {
        self.sums[self.slot(i, j)]
    }

    /// Smallest per-entry count over the table.
    pub fn min_count(&self) -> u64 {
        self.counts.iter().copied().min().unwrap_or(0)
    }

    /// Σ 1/n over all p² ordered entries, counting each off-diagonal
    /// unordered entry twice. Returns None if any count is zero.
    fn ordered_reciprocal_sum(&self) -> Option<f64> {
        let mut total = 0.0;
        for i in 0..self.side {
            for j in i..self.side {
                let n = self.counts[self.slot(i, j)];
                if n == 0 {
                    return None;
                }
                let w = if i == j { 1.0 } else { 2.0 };
                total += w / n as f64;
            }
        }
        Some(total)
    }
}

/// The symmetric estimate `P̂[i,j] = H_{i,j}/n_{i,j}`.
pub fn estimate_matrix(table: &SampleTable) -> Result<Matrix> {
    let p = table.side();
    if table.min_count() == 0 {
        return Err(Error::InsufficientSamples(
            "every entry needs at least one sample before estimating".into(),
        ));
    }
    Ok(Matrix::from_fn(p, p, |i, j| table.sum(i, j) as f64 / table.count(i, j) as f64))
}

/// The Bernstein radius for given side, minimum count, and ordered
/// reciprocal count sum. Shared by [`confidence_radius`] and the Monte Carlo
/// validators, which build the arguments directly.
pub fn bernstein_radius(side: usize, min_count: u64, reciprocal_sum: f64, delta_t: f64) -> f64 {
    let log_term = (2.0 * side as f64 / delta_t).ln();
    2.0 * log_term / (3.0 * min_count as f64) + (log_term / 2.0 * reciprocal_sum).sqrt()
}

/// Evaluates the concentration radius of the module doc for this table at
/// failure probability `delta_t`.
pub fn confidence_radius(table: &SampleTable, delta_t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta_t) || delta_t == 0.0 {
        return Err(Error::Argument(format!("delta_t must lie in (0,1), got {delta_t}")));
    }
    let recip = table.ordered_reciprocal_sum().ok_or_else(|| {
        Error::InsufficientSamples("confidence radius needs every entry sampled".into())
    })?;
    Ok(bernstein_radius(table.side(), table.min_count(), recip, delta_t))
}

/// Per-round failure budget `δ_t = 6δ/(π² m t²)` for round `t` with `m`
/// candidates. Summed over all rounds and candidates this stays below δ.
pub fn delta_schedule(t: u64, m: usize, delta: f64) -> f64 {
    assert!(t >= 1 && m >= 1, "rounds and candidate counts start at 1");
    6.0 * delta / (std::f64::consts::PI.powi(2) * m as f64 * (t as f64) * (t as f64))
}

/// Snapshot of an elimination contest, exposed for inspection.
#[derive(Debug, Clone)]
pub struct EliminationState {
    /// Candidate column indices still alive, in input order.
    pub surviving: Vec<usize>,
    /// Completed sampling rounds; every surviving candidate's entries have
    /// at least this many samples.
    pub round: u64,
    /// Overall failure budget δ of the contest.
    pub delta: f64,
}

/// Outcome of an elimination run.
#[derive(Debug, Clone)]
pub struct SeOutcome {
    /// Winning candidate column index.
    pub winner: usize,
    /// Rounds completed.
    pub rounds: u64,
    /// Oracle calls made by this run.
    pub queries: u64,
    /// True when the run ended by exhausting rounds or budget rather than
    /// by eliminating every rival.
    pub capped: bool,
}

/// Runs the elimination contest among `candidates` extending `base_set`.
/// Returns the winning candidate index.
pub fn run_se(
    base_set: &IndexSet,
    candidates: &[usize],
    oracle: &mut StochasticOracle,
    delta: f64,
    round_cap: u64,
) -> Result<usize> {
    run_se_detailed(base_set, candidates, oracle, delta, round_cap, None).map(|o| o.winner)
}

/// [`run_se`] with a hard query budget: the run returns the empirical leader
/// just before any sampling pass that would overrun `max_queries`.
pub fn run_se_with_budget(
    base_set: &IndexSet,
    candidates: &[usize],
    oracle: &mut StochasticOracle,
    delta: f64,
    round_cap: u64,
    max_queries: u64,
) -> Result<SeOutcome> {
    run_se_detailed(base_set, candidates, oracle, delta, round_cap, Some(max_queries))
}

/// Full-detail entry point shared by the public wrappers.
pub fn run_se_detailed(
    base_set: &IndexSet,
    candidates: &[usize],
    oracle: &mut StochasticOracle,
    delta: f64,
    round_cap: u64,
    max_queries: Option<u64>,
) -> Result<SeOutcome> {
    let k = oracle.side();
    if candidates.is_empty() {
        return Err(Error::Argument("candidate list must be non-empty".into()));
    }
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::Argument(format!("delta must lie in (0,1), got {delta}")));
    }
    if round_cap == 0 {
        return Err(Error::Argument("round_cap must be at least 1".into()));
    }
    if base_set.ambient() != k {
        return Err(Error::Dimension(format!(
            "base set addresses side {} but oracle side is {k}",
            base_set.ambient()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for &c in candidates {
        if c >= k {
            return Err(Error::Dimension(format!("candidate {c} out of range for side {k}")));
        }
        if base_set.contains(c) {
            return Err(Error::Argument(format!("candidate {c} already in the base set")));
        }
        if !seen.insert(c) {
            return Err(Error::Argument(format!("candidate {c} listed twice")));
        }
    }

    let base = base_set.as_slice();
    let b = base.len();
    let p = b + 1;
    let m0 = candidates.len();
    let start_calls = oracle.stats().total_calls();

    // Shared base-block samples, one table for all candidates.
    let mut shared = SampleTable::new(b.max(1));
    let has_shared = b > 0;
    // Per-candidate samples for the extension entries: (base[q], cand) for
    // q < b, then (cand, cand) last.
    let mut ext_counts = vec![vec![0u64; p]; m0];
    let mut ext_sums = vec![vec![0u64; p]; m0];

    let mut state = EliminationState {
        surviving: (0..m0).collect(),
        round: 0,
        delta,
    };

    // Cost in oracle calls of one full sampling pass over the survivors.
    let pass_cost = |alive: usize| -> u64 {
        let shared_entries = if has_shared { (b * (b + 1) / 2) as u64 } else { 0 };
        shared_entries + (alive as u64) * (p as u64)
    };
    let spent = |oracle: &StochasticOracle| oracle.stats().total_calls() - start_calls;

    // Materializes candidate kk's full (b+1)×(b+1) table view.
    let compose = |shared: &SampleTable, cnt: &[u64], sm: &[u64]| -> SampleTable {
        let mut t = SampleTable::new(p);
        for i in 0..b {
            for j in i..b {
                let slot = t.slot(i, j);
                t.counts[slot] = shared.count(i, j);
                t.sums[slot] = shared.sum(i, j);
            }
        }
        for q in 0..b {
            let slot = t.slot(q, b);
            t.counts[slot] = cnt[q];
            t.sums[slot] = sm[q];
        }
        let slot = t.slot(b, b);
        t.counts[slot] = cnt[b];
        t.sums[slot] = sm[b];
        t
    };

    let sample_pass = |oracle: &mut StochasticOracle,
                       shared: &mut SampleTable,
                       ext_counts: &mut [Vec<u64>],
                       ext_sums: &mut [Vec<u64>],
                       surviving: &[usize]| {
        for i in 0..b {
            for j in i..b {
                let y = oracle.query(base[i], base[j]);
                shared.record(i, j, y);
            }
        }
        for &kk in surviving {
            let cand = candidates[kk];
            for (q, &bi) in base.iter().enumerate() {
                let y = oracle.query(bi, cand);
                ext_counts[kk][q] += 1;
                ext_sums[kk][q] += u64::from(y);
            }
            let y = oracle.query(cand, cand);
            ext_counts[kk][b] += 1;
            ext_sums[kk][b] += u64::from(y);
        }
    };

    // Empirical leader among survivors, smallest index on exact ties.
    let empirical_leader = |shared: &SampleTable,
                            ext_counts: &[Vec<u64>],
                            ext_sums: &[Vec<u64>],
                            surviving: &[usize]|
     -> Result<usize> {
        let mut best: Option<(f64, usize)> = None;
        for &kk in surviving {
            let table = compose(shared, &ext_counts[kk], &ext_sums[kk]);
            let est = estimate_matrix(&table)?;
            let s = sigma_min(&est)?;
            let better = match best {
                None => true,
                Some((bs, bc)) => s > bs || (s == bs && candidates[kk] < bc),
            };
            if better {
                best = Some((s, candidates[kk]));
            }
        }
        Ok(best.expect("surviving set is never empty").1)
    };

    // Initial pass: every entry gets one sample. A budget too small for even
    // this cannot produce estimates, so it is an argument error.
    if let Some(maxq) = max_queries {
        if pass_cost(m0) > maxq {
            return Err(Error::Argument(format!(
                "query budget {maxq} cannot cover one sampling pass ({} calls)",
                pass_cost(m0)
            )));
        }
    }
    sample_pass(oracle, &mut shared, &mut ext_counts, &mut ext_sums, &state.surviving);
    state.round = 1;

    loop {
        if state.surviving.len() == 1 {
            let kk = state.surviving[0];
            return Ok(SeOutcome {
                winner: candidates[kk],
                rounds: state.round,
                queries: spent(oracle),
                capped: false,
            });
        }

        // Elimination step at round t.
        let delta_t = delta_schedule(state.round, m0, delta);
        let mut stats: Vec<(usize, f64, f64)> = Vec::with_capacity(state.surviving.len());
        for &kk in &state.surviving {
            let table = compose(&shared, &ext_counts[kk], &ext_sums[kk]);
            let est = estimate_matrix(&table)?;
            let s = sigma_min(&est)?;
            let alpha = confidence_radius(&table, delta_t)?;
            stats.push((kk, s, alpha));
        }
        let &(_, sigma_star, alpha_star) = stats
            .iter()
            .max_by(|a, b| a.1.partial_cmp(&b.1).expect("sigma_min is finite"))
            .expect("non-empty");
        state.surviving = stats
            .iter()
            .filter(|&&(_, s, alpha)| sigma_star - s < alpha_star + alpha)
            .map(|&(kk, _, _)| kk)
            .collect();
        debug_assert!(!state.surviving.is_empty(), "the leader always survives");

        if state.surviving.len() == 1 {
            continue;
        }
        if state.round >= round_cap {
            let winner =
                empirical_leader(&shared, &ext_counts, &ext_sums, &state.surviving)?;
            return Ok(SeOutcome {
                winner,
                rounds: state.round,
                queries: spent(oracle),
                capped: true,
            });
        }
        if let Some(maxq) = max_queries {
            if spent(oracle) + pass_cost(state.surviving.len()) > maxq {
                let winner =
                    empirical_leader(&shared, &ext_counts, &ext_sums, &state.surviving)?;
                return Ok(SeOutcome {
                    winner,
                    rounds: state.round,
                    queries: spent(oracle),
                    capped: true,
                });
            }
        }
        sample_pass(oracle, &mut shared, &mut ext_counts, &mut ext_sums, &state.surviving);
        state.round += 1;
    }
}
