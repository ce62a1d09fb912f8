//! Deterministic pair learning by adaptive column selection and Nyström
//! completion.
//!
//! With exact entry access, a rank-`r` SPSD loss matrix is pinned down by
//! `r` linearly independent columns plus the diagonal: a set of columns
//! `𝒞` is independent exactly when the principal submatrix on `𝒞` is
//! nonsingular, so independence is testable from already-queried entries
//! plus one new diagonal entry. The algorithm:
//!
//! 1. query column 0 fully and start with `𝒞 = {0}`;
//! 2. for each later column `c`, query the diagonal entry `(c,c)` and
//!    accept `c` into `𝒞` when the smallest singular value of the
//!    principal submatrix on `𝒞 ∪ {c}` exceeds `sigma_thresh`; accepted
//!    columns are queried in full;
//! 3. stop scanning once `𝒞` reaches `rank_cap` columns (when a cap is
//!    given), and return the Nyström extension `C W⁻¹ Cᵀ`, where `C` holds
//!    the selected columns and `W` the principal submatrix on `𝒞`.
//!
//! For an exact rank-`r` input with `sigma_thresh = 0` the extension equals
//! the input matrix, after at most `K(r+1)` distinct entry queries. Already
//! queried entries are cached, so re-reads never reach the oracle; the query
//! count in the result is the number of distinct oracle calls.
//!
//! In floating point a dependent column's submatrix has a smallest singular
//! value near machine epsilon rather than exactly zero, which would defeat
//! a literal `> 0` test. The test therefore treats singular values below
//! `1e-12` times the submatrix's largest singular value as zero before
//! comparing against `sigma_thresh`. For inputs that are only approximately
//! low-rank, pass a positive `sigma_thresh` sized to the noise floor; the
//! run then reports observed structure without any recovery guarantee.

use crate::error::{Error, Result};
use crate::matrix::{nystrom_extend, singular_extremes, IndexSet, Matrix, PINV_REL_TOL};
use crate::model::optimal_pair_of;
use crate::oracle::DeterministicOracle;

/// Default acceptance threshold for float inputs: comfortably above the
/// relative-epsilon clamp, far below any real spectral gap.
pub const DEFAULT_SIGMA_THRESH: f64 = 1e-10;

/// One acceptance decision from the column scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDecision {
    /// Column index examined.
    pub column: usize,
    /// Smallest singular value of the candidate principal submatrix, after
    /// the relative-epsilon clamp to zero.
    pub sigma_min: f64,
    /// Whether the column joined the selected set.
    pub accepted: bool,
}

/// Output of a deterministic run.
#[derive(Debug, Clone)]
pub struct PlansResult {
    /// The Nyström completion, a `K×K` matrix.
    pub l_hat: Matrix,
    /// Indices of the selected independent columns.
    pub selected: IndexSet,
    /// Distinct oracle calls made by the run.
    pub queries: u64,
    /// Acceptance log, one entry per examined column.
    pub decisions: Vec<ColumnDecision>,
}

/// Smallest singular value with values below `PINV_REL_TOL · σ_max`
/// clamped to zero, so that numerically dependent columns test as
/// dependent even under a `sigma_thresh` of exactly zero.
fn clamped_sigma_min(m: &Matrix) -> f64 {
    let (sigma_max, sigma_min) = singular_extremes(m);
    if sigma_min < PINV_REL_TOL * sigma_max {
        0.0
    } else {
        sigma_min
    }
}

/// Runs the adaptive column scan against a deterministic oracle.
///
/// `rank_cap` bounds the selected set; pass `None` when the rank is
/// unknown, in which case every column is examined. `sigma_thresh` is the
/// acceptance threshold on the clamped smallest singular value.
pub fn run_plans(
    oracle: &mut DeterministicOracle,
    rank_cap: Option<usize>,
    sigma_thresh: f64,
) -> Result<PlansResult> {
    let k = oracle.side();
    if !sigma_thresh.is_finite() || sigma_thresh < 0.0 {
        return Err(Error::Argument(format!(
            "sigma_thresh must be finite and nonnegative, got {sigma_thresh}"
        )));
    }
    if let Some(cap) = rank_cap {
        if cap == 0 {
            return Err(Error::Argument("rank_cap must be at least 1".into()));
        }
        if cap > k {
            return Err(Error::Dimension(format!(
                "rank_cap {cap} exceeds the matrix side {k}"
            )));
        }
    }

    let start_calls = oracle.stats().total_calls();
    // Entry cache: queries go through here, so the oracle sees each
    // unordered pair at most once.
    let mut known = vec![None::<f64>; k * k];
    fn fetch(
        known: &mut [Option<f64>],
        k: usize,
        oracle: &mut DeterministicOracle,
        i: usize,
        j: usize,
    ) -> f64 {
        if let Some(v) = known[i * k + j] {
            return v;
        }
        let v = oracle.query(i, j);
        known[i * k + j] = Some(v);
        known[j * k + i] = Some(v);
        v
    }

    // Column 0 in full.
    for j in 0..k {
        fetch(&mut known, k, oracle, j, 0);
    }
    let mut selected = vec![0usize];
    let mut decisions = Vec::new();

    for c in 1..k {
        fetch(&mut known, k, oracle, c, c);
        if rank_cap.is_none_or(|cap| selected.len() < cap) {
            // Candidate principal submatrix on selected ∪ {c}; every entry
            // is already cached (selected columns were queried in full, the
            // diagonal entry was just fetched).
            let p = selected.len() + 1;
            let idx: Vec<usize> = selected.iter().copied().chain([c]).collect();
            let sub = Matrix::from_fn(p, p, |a, b| {
                known[idx[a] * k + idx[b]].expect("candidate submatrix entries are cached")
            });
            let sig = clamped_sigma_min(&sub);
            let accepted = sig > sigma_thresh;
            decisions.push(ColumnDecision { column: c, sigma_min: sig, accepted });
            if accepted {
                selected.push(c);
                for j in 0..k {
                    fetch(&mut known, k, oracle, j, c);
                }
            }
        }
        if rank_cap == Some(selected.len()) {
            break;
        }
    }

    let selected = IndexSet::new(selected, k)?;
    let c = Matrix::from_fn(k, selected.len(), |i, a| {
        known[i * k + selected.as_slice()[a]].expect("selected columns are fully cached")
    });
    let w = Matrix::from_fn(selected.len(), selected.len(), |a, b| {
        known[selected.as_slice()[a] * k + selected.as_slice()[b]]
            .expect("selected principal submatrix is cached")
    });
    let l_hat = nystrom_extend(&c, &w, PINV_REL_TOL)?;

    Ok(PlansResult {
        l_hat,
        selected,
        queries: oracle.stats().total_calls() - start_calls,
        decisions,
    })
}

/// Reads the recommended pair off the completion: the entry `(i ≤ j)`
/// minimizing `l_hat`, diagonal included, ties lexicographic.
pub fn recommend_pair(result: &PlansResult) -> (usize, usize, f64) {
    optimal_pair_of(&result.l_hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{norm, principal_submatrix, sigma_min, NormKind};
    use crate::model::{build_loss_matrix, optimal_pair, LossMatrix, PopulationModel};
    use crate::seed::rng_from;
    use rand::Rng;

    fn loss_from_vector(v: &[f64]) -> LossMatrix {
        let k = v.len();
        let m = Matrix::from_fn(k, k, |i, j| v[i] * v[j]);
        LossMatrix::from_matrix(m).unwrap()
    }

    fn random_model(k: usize, r: usize, seed: u64) -> PopulationModel {
        let mut rng = rng_from(seed, &["plans-test-model"]);
        let raw: Vec<f64> = (0..r).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let u: Vec<Vec<f64>> =
            (0..r).map(|_| (0..k).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
        PopulationModel::new(p, u).unwrap()
    }

    // ------------------------------------------------------------ hand trace

    #[test]
    fn rank_one_with_cap_queries_exactly_four_entries() {
        // Column 0 fully (3 calls), then the single capped iteration only
        // fetches the diagonal entry (1,1) before the cap breaks the scan.
        let l = loss_from_vector(&[0.6, 0.3, 0.9]);
        let mut oracle = DeterministicOracle::new(&l);
        let res = run_plans(&mut oracle, Some(1), 0.0).unwrap();
        assert_eq!(res.queries, 4);
        assert_eq!(res.selected.as_slice(), &[0]);
        let err = norm(&res.l_hat.sub(l.matrix()).unwrap(), NormKind::Max);
        assert!(err < 1e-12, "rank-1 recovery error {err}");
    }

    #[test]
    fn rank_one_unknown_rank_also_recovers_exactly() {
        let l = loss_from_vector(&[0.6, 0.3, 0.9]);
        let mut oracle = DeterministicOracle::new(&l);
        let res = run_plans(&mut oracle, None, 0.0).unwrap();
        // Column 0 plus both remaining diagonal entries; no acceptances.
        assert_eq!(res.queries, 5);
        assert_eq!(res.selected.as_slice(), &[0]);
        assert!(res.decisions.iter().all(|d| !d.accepted));
        let err = norm(&res.l_hat.sub(l.matrix()).unwrap(), NormKind::Max);
        assert!(err < 1e-12, "rank-1 recovery error {err}");
    }

    #[test]
    fn zero_matrix_selects_nothing_beyond_the_first_column() {
        let l = LossMatrix::from_matrix(Matrix::zeros(4, 4)).unwrap();
        let mut oracle = DeterministicOracle::new(&l);
        let res = run_plans(&mut oracle, None, 0.0).unwrap();
        assert_eq!(res.selected.as_slice(), &[0]);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(res.l_hat.get(i, j), 0.0);
            }
        }
    }

    // ------------------------------------------------------- exact recovery

    #[test]
    fn random_models_recover_exactly_within_the_query_budget() {
        for (k, r, seed) in [(20, 1, 1u64), (30, 2, 2), (40, 3, 3), (25, 4, 4)] {
            let model = random_model(k, r, seed);
            let l = build_loss_matrix(&model);
            for cap in [Some(r), None] {
                let mut oracle = DeterministicOracle::new(&l);
                let res = run_plans(&mut oracle, cap, 0.0).unwrap();
                let err = norm(&res.l_hat.sub(l.matrix()).unwrap(), NormKind::Max);
                assert!(err <= 1e-9, "K={k} r={r} cap={cap:?}: error {err}");
                assert!(
                    res.queries <= (k * (r + 1)) as u64,
                    "K={k} r={r} cap={cap:?}: {} queries",
                    res.queries
                );
                assert!(res.selected.len() <= r);
                // Selected columns are linearly independent in the true L.
                let w = principal_submatrix(l.matrix(), &res.selected).unwrap();
                assert!(sigma_min(&w).unwrap() > 0.0, "dependent selection K={k} r={r}");
            }
        }
    }

    #[test]
    fn oracle_never_sees_a_pair_twice() {
        let model = random_model(30, 3, 77);
        let l = build_loss_matrix(&model);
        let mut oracle = DeterministicOracle::new(&l);
        let res = run_plans(&mut oracle, Some(3), 0.0).unwrap();
        let stats = oracle.stats();
        assert_eq!(stats.sum_of_counts(), stats.distinct_pairs() as u64);
        assert_eq!(res.queries, stats.total_calls());
    }

    #[test]
    fn identity_matrix_selects_every_column() {
        let l = LossMatrix::from_matrix(Matrix::from_fn(4, 4, |i, j| {
            if i == j {
                1.0
            } else {
                0.0
            }
        }))
        .unwrap();
        let mut oracle = DeterministicOracle::new(&l);
        let res = run_plans(&mut oracle, None, 0.0).unwrap();
        assert_eq!(res.selected.as_slice(), &[0, 1, 2, 3]);
        // 4 (column 0) + 3 + 2 + 1 distinct entries: every entry once.
        assert_eq!(res.queries, 10);
        let err = norm(&res.l_hat.sub(l.matrix()).unwrap(), NormKind::Max);
        assert!(err < 1e-12);
    }

    // -------------------------------------------------------- recommend_pair

    #[test]
    fn recommendation_matches_the_true_optimum() {
        let model = PopulationModel::new(
            vec![0.5, 0.5],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let l = build_loss_matrix(&model);
        let mut oracle = DeterministicOracle::new(&l);
        let res = run_plans(&mut oracle, Some(2), 0.0).unwrap();
        assert_eq!(recommend_pair(&res), (0, 1, 0.0));
        assert_eq!(recommend_pair(&res), optimal_pair(&l));
    }

    #[test]
    fn recommendation_matches_brute_force_on_random_instances() {
        for seed in 0..10u64 {
            let model = random_model(25, 3, 1000 + seed);
            let l = build_loss_matrix(&model);
            let mut oracle = DeterministicOracle::new(&l);
            let res = run_plans(&mut oracle, Some(3), 0.0).unwrap();
            let (i, j, v) = recommend_pair(&res);
            let (ti, tj, tv) = optimal_pair(&l);
            assert_eq!((i, j), (ti, tj), "seed {seed}");
            assert!((v - tv).abs() < 1e-9, "seed {seed}: value {v} vs {tv}");
        }
    }

    #[test]
    fn zero_matrix_recommends_the_lexicographic_floor() {
        let l = LossMatrix::from_matrix(Matrix::zeros(3, 3)).unwrap();
        let mut oracle = DeterministicOracle::new(&l);
        let res = run_plans(&mut oracle, None, 0.0).unwrap();
        assert_eq!(recommend_pair(&res), (0, 0, 0.0));
    }

    // ------------------------------------------------------------ validation

    #[test]
    fn bad_arguments_are_rejected() {
        let l = loss_from_vector(&[0.5, 0.5]);
        let mut oracle = DeterministicOracle::new(&l);
        assert!(matches!(run_plans(&mut oracle, Some(0), 0.0), Err(Error::Argument(_))));
        assert!(matches!(run_plans(&mut oracle, Some(5), 0.0), Err(Error::Dimension(_))));
        assert!(matches!(run_plans(&mut oracle, None, -1.0), Err(Error::Argument(_))));
        assert!(matches!(run_plans(&mut oracle, None, f64::NAN), Err(Error::Argument(_))));
    }

    #[test]
    fn positive_threshold_screens_out_weak_columns() {
        // Nearly rank-1: second component contributes a tiny independent
        // direction. A threshold above its scale keeps the selection at one
        // column; the default threshold (far smaller) accepts it.
        let v = [0.9, 0.5, 0.7, 0.3];
        let mut m = Matrix::from_fn(4, 4, |i, j| 0.999 * v[i] * v[j]);
        let w = [1e-4, -2e-4, 5e-5, -1e-4];
        for i in 0..4 {
            for j in 0..4 {
                m.set(i, j, (m.get(i, j) + w[i] * w[j]).clamp(0.0, 1.0));
            }
        }
        let l = LossMatrix::from_matrix(m.symmetrize()).unwrap();

        let mut oracle = DeterministicOracle::new(&l);
        let strict = run_plans(&mut oracle, None, 1e-3).unwrap();
        assert_eq!(strict.selected.len(), 1, "threshold should reject the weak direction");

        let mut oracle = DeterministicOracle::new(&l);
        let loose = run_plans(&mut oracle, None, DEFAULT_SIGMA_THRESH).unwrap();
        assert_eq!(loose.selected.len(), 2, "default threshold keeps the weak direction");
    }
}
