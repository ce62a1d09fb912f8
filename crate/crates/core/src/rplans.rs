//! Stochastic pair learning: elimination-based column selection followed by
//! a repeated-sampling Nyström estimation phase.
//!
//! # Algorithm
//!
//! The column-selection loop mirrors the deterministic scan, but every
//! σ_min comparison now runs as a successive-elimination contest
//! ([`crate::se`]) because entries arrive as Bernoulli draws. Starting from
//! `𝒞 = {0}`, each of the `r−1` remaining selection steps runs one contest
//! over all unselected columns with failure budget `δ/(2r)` and admits the
//! winner. Contest samples are used only for selection and are discarded
//! afterwards; the estimation phase below draws fresh samples, so its error
//! analysis is unconditioned on the selection path.
//!
//! Estimation then rebuilds the selected blocks by averaging: `Ĉ` (the
//! `K×r` column block) needs every entry sampled at least `m₁` times and
//! `Ŵ` (the `r×r` principal block) at least `m₂` times, where
//!
//! ```text
//! m₁ = ⌈100·C₁·ln(2Kr/δ)·max(r^{5/2}/ε, r²/ε²)⌉
//! m₂ = ⌈200·C₂·ln(2r/δ)·max(r³/ε, r⁵/ε²)⌉
//! ```
//!
//! and `C₁`, `C₂` are norm functionals of the true `W⁻¹` and `C`. Those
//! constants are unknowable exactly (they depend on the matrix being
//! estimated), so a pilot pass samples every selected entry a small number
//! of times and plugs the pilot estimates into the formulas; degenerate
//! plug-ins fall back to 1.0 with a warning. `Ŵ` entries double as rows of
//! `Ĉ`, so shared entries are sampled to the larger of the two targets and
//! reused, never estimated twice with different values. Per-entry targets
//! are capped at [`SAMPLE_CAP`]; the result records when the cap bound.
//! The returned completion is the symmetrized extension `Ĉ Ŵ⁻¹ Ĉᵀ` (with a
//! pseudo-inverse at the matrix-core tolerance) and the recommended pair is
//! its smallest entry.
//!
//! With the stated `m₁`, `m₂` the extension lands within `ε` of the true
//! `C W⁻¹ Cᵀ` in max-norm with probability at least `1−δ`. A Taylor-series
//! step inside that analysis needs `‖W⁻¹‖₂·‖Ŵ−W‖₂ ≤ 1/2`; the run checks
//! the observable surrogate `‖Ŵ⁻¹‖₂ · α ≤ 1/2` (`α` the Bernstein radius
//! of the `Ŵ` table) and logs a warning when it fails, proceeding anyway.
//!
//! # Budgeted variant
//!
//! Experiments allocate a fixed query budget instead of (ε, δ):
//! [`run_rplans_budget`] reserves `K·r` queries for estimation, spends at
//! most `split·budget` on the `r−1` selection contests (equal shares, each
//! contest stopping before an unaffordable sampling pass), and pours the
//! remainder into estimation with per-entry targets proportional to the
//! `m₁ : max(m₁, m₂)` ratio at the plug-in constants. Queries never exceed
//! the budget.

use crate::error::{Error, Result};
use crate::matrix::{
    c1_c2_from_inverse, nystrom_extend, pinv, sigma_min, IndexSet, Matrix, PINV_REL_TOL,
};
use crate::model::optimal_pair_of;
use crate::oracle::StochasticOracle;
use crate::se::{bernstein_radius, run_se_detailed, run_se_with_budget};

/// Hard per-entry cap on estimation samples. The concentration-bound counts
/// are extremely conservative; the cap keeps worst-case plug-ins finite.
pub const SAMPLE_CAP: u64 = 100_000;

/// Pilot samples per entry (floor; the budget variant scales this up).
pub const PILOT_MIN: u64 = 30;

/// Default round cap for the selection contests, used by callers that have
/// no better problem-specific bound.
pub const DEFAULT_ROUND_CAP: u64 = 100_000;

/// Default fraction of a budget handed to column selection. Selection needs
/// comparatively few rounds to separate candidate columns, while the final
/// accuracy is set by the estimation phase, so the default leans toward
/// estimation.
pub const DEFAULT_SPLIT: f64 = 0.3;

/// Failure budget used by the budgeted variant wherever the explicit mode
/// would use δ (contest radii, allocation ratios, diagnostics).
const BUDGET_DELTA: f64 = 0.1;

/// Reference accuracy at which the budgeted variant evaluates the m₁/m₂
/// ratio; only the ratio matters, the scale is set by the budget.
const BUDGET_EPS_REF: f64 = 0.01;

/// The raw (un-ceiled) sample-count expressions, shared by the public
/// ceiling form and the budget variant's ratio computation.
fn sample_counts_raw(c1: f64, c2: f64, k: usize, r: usize, eps: f64, delta: f64) -> (f64, f64) {
    let rf = r as f64;
    let m1 = 100.0
        * c1
        * (2.0 * k as f64 * rf / delta).ln()
        * (rf.powf(2.5) / eps).max(rf.powi(2) / (eps * eps));
    let m2 = 200.0
        * c2
        * (2.0 * rf / delta).ln()
        * (rf.powi(3) / eps).max(rf.powi(5) / (eps * eps));
    (m1, m2)
}

/// Per-entry sample counts `(m₁, m₂)` for the estimation phase, as exact
/// ceilings of the concentration-bound expressions. Counts beyond the range
/// of `u64` saturate.
pub fn sample_counts(
    c1: f64,
    c2: f64,
    k: usize,
    r: usize,
    eps: f64,
    delta: f64,
) -> Result<(u64, u64)> {
    if !(c1 > 0.0 && c1.is_finite() && c2 > 0.0 && c2.is_finite()) {
        return Err(Error::Argument(format!(
            "constants must be positive and finite, got C1={c1}, C2={c2}"
        )));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Argument(format!("eps must be positive and finite, got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Argument(format!("delta must lie in (0,1), got {delta}")));
    }
    if r == 0 || k == 0 || r > k {
        return Err(Error::Argument(format!("need 1 <= r <= K, got r={r}, K={k}")));
    }
    let (m1, m2) = sample_counts_raw(c1, c2, k, r, eps, delta);
    let to_count = |x: f64| -> u64 {
        if x >= u64::MAX as f64 {
            u64::MAX
        } else {
            x.ceil() as u64
        }
    };
    Ok((to_count(m1), to_count(m2)))
}

/// The estimated Nyström blocks with their per-entry sample counts.
#[derive(Debug, Clone)]
pub struct NystromFactors {
    /// Selected column indices, ascending, `|selected| = r`.
    pub selected: IndexSet,
    /// `K×r` estimated column block.
    pub c_hat: Matrix,
    /// `r×r` estimated principal block; row `a` equals row `selected[a]`
    /// of `c_hat` (shared estimates, by construction).
    pub w_hat: Matrix,
    /// Sample counts for `c_hat`, row-major `K×r`.
    pub c_counts: Vec<u64>,
    /// Sample counts for `w_hat`, row-major `r×r`.
    pub w_counts: Vec<u64>,
}

/// Output of a stochastic run.
#[derive(Debug, Clone)]
pub struct RPlansResult {
    /// Symmetrized Nyström completion, `K×K`.
    pub l_hat: Matrix,
    /// Recommended pair `(i ≤ j)`: the smallest completion entry.
    pub pair: (usize, usize),
    /// Completion value at the recommended pair.
    pub value_hat: f64,
    /// Total oracle calls across both phases.
    pub queries: u64,
    /// Oracle calls spent on column selection.
    pub selection_queries: u64,
    /// Oracle calls spent on estimation (pilot included).
    pub estimation_queries: u64,
    /// Estimated blocks and their sample counts.
    pub factors: NystromFactors,
    /// Per-entry target for `c_hat` entries. Explicit mode: the computed
    /// m₁ before capping. Budget mode: the realized budget-scaled target.
    pub m1: u64,
    /// Per-entry target for `w_hat` entries, same conventions as `m1`.
    pub m2: u64,
    /// True when [`SAMPLE_CAP`] clamped a computed target.
    pub cap_hit: bool,
}

/// Sample ledger over the unordered entries of the selected blocks.
struct EstimationTable {
    /// Canonical `(lo, hi)` entries, sorted ascending.
    entries: Vec<(usize, usize)>,
    counts: Vec<u64>,
    sums: Vec<u64>,
    /// Parallel flag: both endpoints selected (a `Ŵ` entry).
    shared: Vec<bool>,
}

impl EstimationTable {
    fn for_selected(k: usize, selected: &IndexSet) -> Self {
        let mut set = std::collections::BTreeSet::new();
        for &c in selected.as_slice() {
            for i in 0..k {
                set.insert((i.min(c), i.max(c)));
            }
        }
        let entries: Vec<(usize, usize)> = set.into_iter().collect();
        let n = entries.len();
        let shared =
            entries.iter().map(|&(i, j)| selected.contains(i) && selected.contains(j)).collect();
        Self { entries, counts: vec![0; n], sums: vec![0; n], shared }
    }

    fn len(&self) -> usize {
        self.entries.len()
    }

    fn shared_count(&self) -> u64 {
        self.shared.iter().filter(|&&s| s).count() as u64
    }

    /// Draws `n` fresh samples of entry `slot`.
    fn sample(&mut self, slot: usize, oracle: &mut StochasticOracle, n: u64) {
        let (i, j) = self.entries[slot];
        let mut hits = 0u64;
        for _ in 0..n {
            hits += u64::from(oracle.query(i, j));
        }
        self.counts[slot] += n;
        self.sums[slot] += hits;
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let key = (i.min(j), i.max(j));
        self.entries.binary_search(&key).expect("entry belongs to the estimation block")
    }

    fn mean(&self, i: usize, j: usize) -> f64 {
        let s = self.slot(i, j);
        debug_assert!(self.counts[s] > 0, "estimation entries are always piloted first");
        self.sums[s] as f64 / self.counts[s] as f64
    }

    fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[self.slot(i, j)]
    }
}

fn build_factors(k: usize, selected: &IndexSet, table: &EstimationTable) -> NystromFactors {
    let r = selected.len();
    let sel = selected.as_slice();
    let c_hat = Matrix::from_fn(k, r, |i, a| table.mean(i, sel[a]));
    let w_hat = Matrix::from_fn(r, r, |a, b| table.mean(sel[a], sel[b]));
    let c_counts: Vec<u64> =
        (0..k).flat_map(|i| (0..r).map(move |a| (i, a))).map(|(i, a)| table.count(i, sel[a])).collect();
    let w_counts: Vec<u64> = (0..r)
        .flat_map(|a| (0..r).map(move |b| (a, b)))
        .map(|(a, b)| table.count(sel[a], sel[b]))
        .collect();
    NystromFactors { selected: selected.clone(), c_hat, w_hat, c_counts, w_counts }
}

/// Plug-in `C₁`, `C₂` from pilot estimates, with a guarded fallback: a
/// degenerate pilot (zero or singular block) yields non-finite or
/// non-positive functionals, which default to 1.0 with a warning.
fn plugin_constants(c_hat: &Matrix, w_hat: &Matrix) -> (f64, f64) {
    let fallback = |tag: &str| {
        log::warn!("pilot estimate produced a degenerate {tag}; defaulting to 1.0");
        1.0
    };
    let w_inv = match pinv(w_hat, PINV_REL_TOL) {
        Ok(m) => m,
        Err(e) => {
            log::warn!("pilot W-block pseudo-inverse failed ({e}); defaulting constants to 1.0");
            return (1.0, 1.0);
        }
    };
    let (c1, c2) = c1_c2_from_inverse(&w_inv, c_hat);
    let c1 = if c1.is_finite() && c1 > 0.0 { c1 } else { fallback("C1") };
    let c2 = if c2.is_finite() && c2 > 0.0 { c2 } else { fallback("C2") };
    (c1, c2)
}

/// Warns when the observable surrogate of the Taylor-expansion
/// precondition fails: `α / σ_min(Ŵ) > 1/2` with `α` the Bernstein radius
/// of the `Ŵ` sample table at failure probability `delta`.
fn taylor_diagnostic(table: &EstimationTable, w_hat: &Matrix, delta: f64) {
    let r = w_hat.rows();
    let mut min_count = u64::MAX;
    let mut recip = 0.0;
    for slot in 0..table.len() {
        if !table.shared[slot] {
            continue;
        }
        let n = table.counts[slot];
        min_count = min_count.min(n);
        let (i, j) = table.entries[slot];
        recip += if i == j { 1.0 } else { 2.0 } / n as f64;
    }
    let alpha = bernstein_radius(r, min_count, recip, delta);
    let smin = sigma_min(w_hat).expect("w_hat is square");
    if smin <= 0.0 || alpha / smin > 0.5 {
        log::warn!(
            "estimated W-block may be too noisy for the expansion-based guarantee: \
             sigma_min = {smin:.3e}, radius = {alpha:.3e}; proceeding anyway"
        );
    }
}

/// Shared tail: builds the factors, runs diagnostics, extends, and packs
/// the result.
#[allow(clippy::too_many_arguments)]
fn finalize(
    oracle: &StochasticOracle,
    start_calls: u64,
    selection_queries: u64,
    selected: &IndexSet,
    table: &EstimationTable,
    m1: u64,
    m2: u64,
    cap_hit: bool,
    diag_delta: f64,
) -> Result<RPlansResult> {
    let k = oracle.side();
    let factors = build_factors(k, selected, table);
    taylor_diagnostic(table, &factors.w_hat, diag_delta);
    let l_hat = nystrom_extend(&factors.c_hat, &factors.w_hat, PINV_REL_TOL)?.symmetrize();
    let (i, j, value_hat) = optimal_pair_of(&l_hat);
    let queries = oracle.stats().total_calls() - start_calls;
    Ok(RPlansResult {
        l_hat,
        pair: (i, j),
        value_hat,
        queries,
        selection_queries,
        estimation_queries: queries - selection_queries,
        factors,
        m1,
        m2,
        cap_hit,
    })
}

fn validate_common(k: usize, r: usize, round_cap: u64) -> Result<()> {
    if r == 0 {
        return Err(Error::Argument("rank r must be at least 1".into()));
    }
    if r > k {
        return Err(Error::Argument(format!("rank r={r} exceeds the matrix side K={k}")));
    }
    if round_cap == 0 {
        return Err(Error::Argument("round_cap must be at least 1".into()));
    }
    Ok(())
}

/// Runs the selection contests for phases `t = 2..=r`. `phase_budget`
/// limits each contest's oracle calls; a share too small to fund even one
/// sampling pass skips the contest and admits the smallest remaining
/// column. Returns the selected set, ascending.
fn select_columns(
    oracle: &mut StochasticOracle,
    r: usize,
    se_delta: f64,
    round_cap: u64,
    phase_budget: Option<u64>,
) -> Result<Vec<usize>> {
    let k = oracle.side();
    let mut selected = vec![0usize];
    for _t in 2..=r {
        let base = IndexSet::new(selected.clone(), k)?;
        let candidates: Vec<usize> = (0..k).filter(|i| !selected.contains(i)).collect();
        let b = base.len();
        let pass_cost = (b * (b + 1) / 2 + candidates.len() * (b + 1)) as u64;
        let winner = match phase_budget {
            Some(share) if share < pass_cost => {
                log::warn!(
                    "selection share {share} cannot fund one sampling pass ({pass_cost} calls); \
                     admitting column {} without a contest",
                    candidates[0]
                );
                candidates[0]
            }
            Some(share) => {
                run_se_with_budget(&base, &candidates, oracle, se_delta, round_cap, share)?.winner
            }
            None => {
                run_se_detailed(&base, &candidates, oracle, se_delta, round_cap, None)?.winner
            }
        };
        selected.push(winner);
        selected.sort_unstable();
    }
    Ok(selected)
}

/// Runs the full stochastic algorithm at explicit accuracy `(eps, delta)`.
///
/// Selection contests get failure budget `delta/(2r)` each and at most
/// `round_cap` sampling rounds. The estimation phase samples to the
/// concentration-bound targets from [`sample_counts`] at pilot plug-in
/// constants, capped per entry at [`SAMPLE_CAP`].
pub fn run_rplans(
    oracle: &mut StochasticOracle,
    r: usize,
    eps: f64,
    delta: f64,
    round_cap: u64,
) -> Result<RPlansResult> {
    let k = oracle.side();
    validate_common(k, r, round_cap)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Argument(format!("eps must be positive and finite, got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Argument(format!("delta must lie in (0,1), got {delta}")));
    }

    let start_calls = oracle.stats().total_calls();
    let se_delta = delta / (2.0 * r as f64);
    let selected = select_columns(oracle, r, se_delta, round_cap, None)?;
    let selection_queries = oracle.stats().total_calls() - start_calls;

    let selected = IndexSet::new(selected, k)?;
    let mut table = EstimationTable::for_selected(k, &selected);
    for slot in 0..table.len() {
        table.sample(slot, oracle, PILOT_MIN);
    }
    let pilot = build_factors(k, &selected, &table);
    let (c1, c2) = plugin_constants(&pilot.c_hat, &pilot.w_hat);
    let (m1, m2) = sample_counts(c1, c2, k, r, eps, delta)?;
    let t_c = m1.min(SAMPLE_CAP);
    let t_w = m1.max(m2).min(SAMPLE_CAP);
    let cap_hit = m1.max(m2) > SAMPLE_CAP;
    for slot in 0..table.len() {
        let target = if table.shared[slot] { t_w } else { t_c };
        let have = table.counts[slot];
        if have < target {
            table.sample(slot, oracle, target - have);
        }
    }

    finalize(oracle, start_calls, selection_queries, &selected, &table, m1, m2, cap_hit, delta)
}

/// Runs the stochastic algorithm under a hard total query budget.
///
/// At most `split·budget` goes to selection (equal shares across the `r−1`
/// contests), with `K·r` queries always reserved for estimation. The
/// estimation remainder is allocated per entry proportionally to the
/// `m₁ : max(m₁, m₂)` ratio at the pilot plug-in constants. Total queries
/// never exceed `budget`.
pub fn run_rplans_budget(
    oracle: &mut StochasticOracle,
    r: usize,
    budget: u64,
    split: f64,
    round_cap: u64,
) -> Result<RPlansResult> {
    let k = oracle.side();
    validate_common(k, r, round_cap)?;
    if !(0.0..=1.0).contains(&split) {
        return Err(Error::Argument(format!("split must lie in [0,1], got {split}")));
    }
    let reserve = (k * r) as u64;
    if budget < reserve {
        return Err(Error::Argument(format!(
            "budget {budget} is below the K*r = {reserve} minimum"
        )));
    }

    let start_calls = oracle.stats().total_calls();
    let selection_total = ((split * budget as f64).floor() as u64).min(budget - reserve);
    let phase_share = if r > 1 { selection_total / (r as u64 - 1) } else { 0 };
    let selected = select_columns(oracle, r, BUDGET_DELTA, round_cap, Some(phase_share))?;
    let selection_queries = oracle.stats().total_calls() - start_calls;

    let selected = IndexSet::new(selected, k)?;
    let mut table = EstimationTable::for_selected(k, &selected);
    let n_entries = table.len() as u64;
    let mut remaining = budget - selection_queries;

    // Pilot, scaled up with the budget but never beyond what fits.
    let p0 = PILOT_MIN.max(budget / (10 * reserve)).min(remaining / n_entries).max(1);
    for slot in 0..table.len() {
        table.sample(slot, oracle, p0);
    }
    remaining -= p0 * n_entries;

    let pilot = build_factors(k, &selected, &table);
    let (c1, c2) = plugin_constants(&pilot.c_hat, &pilot.w_hat);
    let (m1_ref, m2_ref) = sample_counts_raw(c1, c2, k, r, BUDGET_EPS_REF, BUDGET_DELTA);
    let t_c_raw = m1_ref;
    let t_w_raw = m1_ref.max(m2_ref);
    let n_w = table.shared_count();
    let n_c = n_entries - n_w;
    let scale =
        (remaining + p0 * n_entries) as f64 / (n_c as f64 * t_c_raw + n_w as f64 * t_w_raw);
    let to_target = |raw: f64| -> u64 {
        let t = scale * raw;
        if !t.is_finite() || t < 0.0 {
            p0
        } else if t >= u64::MAX as f64 {
            u64::MAX
        } else {
            t.floor() as u64
        }
    };
    let t_c = to_target(t_c_raw);
    let t_w = to_target(t_w_raw);

    // Top up in canonical entry order; the last entry may stay partial when
    // the budget runs dry, and the loop can never overspend.
    for slot in 0..table.len() {
        if remaining == 0 {
            break;
        }
        let target = if table.shared[slot] { t_w } else { t_c };
        let need = target.saturating_sub(table.counts[slot]).min(remaining);
        if need > 0 {
            table.sample(slot, oracle, need);
            remaining -= need;
        }
    }

    finalize(
        oracle,
        start_calls,
        selection_queries,
        &selected,
        &table,
        t_c,
        t_w,
        false,
        BUDGET_DELTA,
    )
}
