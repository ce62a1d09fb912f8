//! Baseline algorithms that treat every unordered item pair as an
//! independent bandit arm.
//!
//! All three baselines ignore the low-rank structure entirely: the
//! `K(K+1)/2` unordered pairs (diagonal included) are flattened into arms
//! through a row-major bijection, and classical best-arm machinery runs on
//! top. They are the comparison points for the structured algorithms.
//!
//! - [`naive_uniform`]: splits the budget equally across arms (leftovers go
//!   one each to the lexicographically first arms) and picks the smallest
//!   empirical loss.
//! - [`lil_ucb`]: optimistic sampling with an anytime
//!   law-of-iterated-logarithm radius; at budget exhaustion the empirically
//!   best arm wins. The radius parameterization is a standard heuristic
//!   choice (`ε̃ = 0.01`, `β = 1`, `ω = δ/5`, `δ = 0.1`), recorded here
//!   because no canonical budget-mode setting exists.
//! - [`pairwise_se`]: classical successive elimination with per-round
//!   radius `sqrt(ln(4·arms·t²/δ) / (2t))`, eliminating every arm whose
//!   empirical-reward upper bound falls below the leader's lower bound.
//!
//! All baselines maximize empirical reward `1 − L̂`, equivalently minimize
//! the empirical loss; unsampled arms count as loss 1.0 (worst case), and
//! exact ties resolve toward the lexicographically first pair.

use crate::error::{Error, Result};
use crate::oracle::StochasticOracle;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Number of unordered pairs (arms) over `k` items, diagonal included.
pub fn arm_count(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Flat arm id of the unordered pair `{i, j}`: row-major over the upper
/// triangle including the diagonal.
pub fn pair_to_arm(i: usize, j: usize, k: usize) -> usize {
    assert!(i < k && j < k, "pair ({i},{j}) out of range for {k} items");
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    // lo*k − lo(lo−1)/2 offsets past the first lo rows, written without
    // intermediate underflow.
    lo * (2 * k - lo + 1) / 2 + (hi - lo)
}

/// Inverse of [`pair_to_arm`]: the pair `(i ≤ j)` of a flat arm id.
pub fn arm_to_pair(arm: usize, k: usize) -> (usize, usize) {
    assert!(arm < arm_count(k), "arm {arm} out of range for {k} items");
    let mut lo = 0usize;
    let mut offset = 0usize;
    // Row lo holds k − lo arms; walk rows until the id falls inside.
    while arm >= offset + (k - lo) {
        offset += k - lo;
        lo += 1;
    }
    (lo, lo + (arm - offset))
}

/// Output of a baseline run.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    /// Chosen pair `(i ≤ j)`.
    pub pair: (usize, usize),
    /// Empirical loss estimate of the chosen pair (1.0 when unsampled).
    pub value_hat: f64,
    /// Oracle calls made.
    pub queries: u64,
}

/// Per-arm tallies with the shared selection rule.
struct ArmStats {
    pulls: Vec<u64>,
    losses: Vec<u64>,
}

impl ArmStats {
    fn new(arms: usize) -> Self {
        Self { pulls: vec![0; arms], losses: vec![0; arms] }
    }

    fn pull(&mut self, arm: usize, k: usize, oracle: &mut StochasticOracle) {
        let (i, j) = arm_to_pair(arm, k);
        self.losses[arm] += u64::from(oracle.query(i, j));
        self.pulls[arm] += 1;
    }

    /// Empirical loss; unsampled arms pessimistically score 1.0.
    fn loss_mean(&self, arm: usize) -> f64 {
        if self.pulls[arm] == 0 {
            1.0
        } else {
            self.losses[arm] as f64 / self.pulls[arm] as f64
        }
    }

    fn reward_mean(&self, arm: usize) -> f64 {
        1.0 - self.loss_mean(arm)
    }

    /// Arm with the smallest empirical loss; arm-id order breaks ties,
    /// which is exactly lexicographic order on pairs.
    fn best_among<I: IntoIterator<Item = usize>>(&self, arms: I) -> usize {
        let mut best: Option<(f64, usize)> = None;
        for a in arms {
            let v = self.loss_mean(a);
            if best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, a));
            }
        }
        best.expect("arm iterator is never empty").1
    }
}

/// Uniform budget allocation over all arms.
///
/// Each arm receives `floor(budget / arms)` pulls; the remainder goes to
/// the lexicographically first arms, one extra pull each. Spends the budget
/// exactly and returns the smallest empirical loss.
pub fn naive_uniform(oracle: &mut StochasticOracle, budget: u64) -> Result<BaselineResult> {
    if budget == 0 {
        return Err(Error::Argument("budget must be at least 1".into()));
    }
    let k = oracle.side();
    let arms = arm_count(k);
    let per = budget / arms as u64;
    let extra = (budget % arms as u64) as usize;
    let mut stats = ArmStats::new(arms);
    for arm in 0..arms {
        let n = per + u64::from(arm < extra);
        for _ in 0..n {
            stats.pull(arm, k, oracle);
        }
    }
    let best = stats.best_among(0..arms);
    Ok(BaselineResult { pair: arm_to_pair(best, k), value_hat: stats.loss_mean(best), queries: budget })
}

// Heuristic radius parameters; no canonical budget-mode setting exists, so
// these standard values are fixed and documented here.
const LIL_EPS: f64 = 0.01;
const LIL_BETA: f64 = 1.0;
const LIL_DELTA: f64 = 0.1;
const LIL_OMEGA: f64 = LIL_DELTA / 5.0;

/// Anytime iterated-logarithm radius at `n` pulls. The inner logarithm is
/// clamped to 1 before dividing by ω so the outer logarithm stays positive
/// at small `n` (at n = 1 the raw inner value would make it negative).
fn lil_radius(n: u64) -> f64 {
    let nf = n as f64;
    let inner = ((1.0 + LIL_EPS) * nf).ln().max(1.0);
    (1.0 + LIL_BETA)
        * (1.0 + LIL_EPS.sqrt())
        * (2.0 * (1.0 + LIL_EPS) * (inner / LIL_OMEGA).ln() / nf).sqrt()
}

/// Max-heap entry: higher score wins, smaller arm id wins ties. `stamp`
/// records the arm's pull count at push time, so entries invalidated by a
/// later pull are recognized and discarded on pop.
struct UcbEntry {
    score: f64,
    arm: usize,
    stamp: u64,
}

impl PartialEq for UcbEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for UcbEntry {}
impl PartialOrd for UcbEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for UcbEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .partial_cmp(&other.score)
            .expect("UCB scores are finite")
            .then_with(|| other.arm.cmp(&self.arm))
            .then_with(|| self.stamp.cmp(&other.stamp))
    }
}

/// Optimistic best-arm sampling with the iterated-logarithm radius.
///
/// Requires one initialization pull per arm, then always pulls the arm with
/// the largest `reward mean + radius` until the budget is spent. The upper
/// confidence scores live in a lazy max-heap: an arm's score changes only
/// when the arm itself is pulled (the radius depends on its own pull count
/// alone), so stale entries are simply discarded on pop and replaced with a
/// freshly scored one.
pub fn lil_ucb(oracle: &mut StochasticOracle, budget: u64) -> Result<BaselineResult> {
    let k = oracle.side();
    let arms = arm_count(k);
    if budget < arms as u64 {
        return Err(Error::Argument(format!(
            "budget {budget} is below one initialization pull per arm ({arms})"
        )));
    }
    let mut stats = ArmStats::new(arms);
    let mut heap = BinaryHeap::with_capacity(arms);
    for arm in 0..arms {
        stats.pull(arm, k, oracle);
        heap.push(UcbEntry { score: stats.reward_mean(arm) + lil_radius(1), arm, stamp: 1 });
    }
    let mut spent = arms as u64;
    while spent < budget {
        let top = heap.pop().expect("heap holds every arm");
        if top.stamp != stats.pulls[top.arm] {
            // Stale: the arm was pulled after this entry was pushed.
            let n = stats.pulls[top.arm];
            heap.push(UcbEntry {
                score: stats.reward_mean(top.arm) + lil_radius(n),
                arm: top.arm,
                stamp: n,
            });
            continue;
        }
        stats.pull(top.arm, k, oracle);
        spent += 1;
        let n = stats.pulls[top.arm];
        heap.push(UcbEntry {
            score: stats.reward_mean(top.arm) + lil_radius(n),
            arm: top.arm,
            stamp: n,
        });
    }
    let best = stats.best_among(0..arms);
    Ok(BaselineResult { pair: arm_to_pair(best, k), value_hat: stats.loss_mean(best), queries: budget })
}

/// Classical successive elimination over the flattened arms.
///
/// Round `t` samples every surviving arm once and eliminates arms whose
/// empirical-reward upper bound `mean + β_t` falls below the leader's lower
/// bound `mean − β_t`, with `β_t = sqrt(ln(4·arms·t²/δ) / (2t))`. The run
/// stops with the survivor, or returns the empirical leader once `2β_t ≤
/// eps` (the requested accuracy is certified) or at `round_cap`.
pub fn pairwise_se(
    oracle: &mut StochasticOracle,
    eps: f64,
    delta: f64,
    round_cap: u64,
) -> Result<BaselineResult> {
    pairwise_se_with_budget(oracle, eps, delta, round_cap, u64::MAX)
}

/// [`pairwise_se`] under a hard query budget: the run returns the empirical
/// leader before any round it cannot afford. Used by budget sweeps, where
/// `eps = 0` makes the budget the only stopping rule besides elimination.
pub fn pairwise_se_with_budget(
    oracle: &mut StochasticOracle,
    eps: f64,
    delta: f64,
    round_cap: u64,
    max_queries: u64,
) -> Result<BaselineResult> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Argument(format!("eps must be finite and nonnegative, got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Argument(format!("delta must lie in (0,1), got {delta}")));
    }
    if round_cap == 0 {
        return Err(Error::Argument("round_cap must be at least 1".into()));
    }
    let k = oracle.side();
    let arms = arm_count(k);
    if max_queries < arms as u64 {
        return Err(Error::Argument(format!(
            "query budget {max_queries} cannot cover one round over {arms} arms"
        )));
    }
    let mut stats = ArmStats::new(arms);
    let mut surviving: Vec<usize> = (0..arms).collect();
    let mut spent = 0u64;
    let mut t = 0u64;
    loop {
        // One sampling round over the survivors.
        for &arm in &surviving {
            stats.pull(arm, k, oracle);
        }
        spent += surviving.len() as u64;
        t += 1;

        if surviving.len() == 1 {
            break;
        }
        let beta = ((4.0 * arms as f64 * (t as f64) * (t as f64) / delta).ln() / (2.0 * t as f64))
            .sqrt();
        let leader = stats.best_among(surviving.iter().copied());
        let lower = stats.reward_mean(leader) - beta;
        surviving.retain(|&a| a == leader || stats.reward_mean(a) + beta >= lower);

        if surviving.len() == 1 || (eps > 0.0 && 2.0 * beta <= eps) || t >= round_cap {
            break;
        }
        if spent + surviving.len() as u64 > max_queries {
            break;
        }
    }
    let best = stats.best_among(surviving.iter().copied());
    Ok(BaselineResult { pair: arm_to_pair(best, k), value_hat: stats.loss_mean(best), queries: spent })
}
