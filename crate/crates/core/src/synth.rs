//! Synthetic instance generation and clustered-rating ingestion.
//!
//! Two sources of test problems feed the experiment harness:
//!
//! - [`gen_synthetic`] draws a random `K×r` factor with uniform entries,
//!   forms the rank-`r` SPSD product, and rescales it so the largest entry
//!   is exactly 1. Draws are rejected until the smallest entry sits
//!   strictly off the diagonal, so the optimal pair is two distinct items
//!   rather than the degenerate "same item twice" choice. At most 100
//!   redraws are attempted before giving up: rank-1 products provably
//!   always place their minimum on the diagonal, so the cap also turns
//!   that structural impossibility into a clean error.
//! - [`ingest_ratings`] turns a binary users-by-items rating table plus
//!   per-user group labels into a [`PopulationModel`]: each group's weight
//!   is its share of users and its like-probability for an item is the
//!   within-group mean rating.
//!
//! [`gen_model`] is the mixture-level sibling of [`gen_synthetic`] for
//! callers that need group structure (weights and like-probabilities)
//! rather than just a loss matrix.
//!
//! Every generator consumes a dedicated tagged RNG stream, so output is
//! a pure function of the seed regardless of what else runs in the
//! process or in parallel.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{LossMatrix, PopulationModel};
use crate::seed::rng_from;
use rand::Rng;

/// Redraw cap for the off-diagonal-minimum rejection loop.
const MAX_REDRAWS: u32 = 100;

/// Generates a random `K×K` SPSD loss matrix of rank `r` with entries in
/// [0,1], maximum entry exactly 1, and minimum entry strictly off the
/// diagonal.
///
/// Each attempt fills a fresh `K×r` factor with uniform [0,1) entries
/// (row-major draw order), forms the normalized Gram matrix, and accepts
/// it only if the smallest off-diagonal entry is strictly below the
/// smallest diagonal entry. Attempt `a` uses the RNG stream tagged
/// `("synthetic", a)`, so results do not depend on how many attempts
/// earlier seeds needed.
///
/// # Errors
///
/// `Argument` when `r` is outside `1..=k` or `k < 2`; `Data` when 100
/// attempts all leave the minimum on the diagonal (certain for `r = 1`,
/// where the minimum entry of `x xᵀ` is always the squared smallest
/// coordinate).
pub fn gen_synthetic(k: usize, r: usize, seed: u64) -> Result<LossMatrix> {
    if k < 2 {
        return Err(Error::Argument(format!(
            "need at least 2 items for an off-diagonal optimum, got {k}"
        )));
    }
    if r < 1 || r > k {
        return Err(Error::Argument(format!("rank {r} outside 1..={k}")));
    }
    for attempt in 0..MAX_REDRAWS {
        let mut rng = rng_from(seed, &["synthetic", &attempt.to_string()]);
        let factor = Matrix::from_fn(k, r, |_, _| rng.gen::<f64>());
        let gram = factor.mul(&factor.transpose());
        let peak = gram.data().iter().cloned().fold(0.0_f64, f64::max);
        if peak <= 0.0 {
            continue;
        }
        // Normalize and mirror the upper triangle so the result is
        // bit-exactly symmetric no matter how the product kernel rounds.
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = (gram.get(i, j) / peak).clamp(0.0, 1.0);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        let min_diag = (0..k).map(|i| m.get(i, i)).fold(f64::INFINITY, f64::min);
        let mut min_off = f64::INFINITY;
        for i in 0..k {
            for j in (i + 1)..k {
                min_off = min_off.min(m.get(i, j));
            }
        }
        if min_off < min_diag {
            return LossMatrix::from_matrix(m);
        }
    }
    Err(Error::Data(format!(
        "no draw out of {MAX_REDRAWS} placed the minimum entry off the diagonal \
         (K={k}, r={r}; rank-1 instances cannot satisfy this)"
    )))
}

/// Generates a random `r`-group mixture over `k` items: group weights are
/// normalized uniform draws and every like-probability is uniform on
/// [0,1). The induced loss matrix is SPSD with rank at most `r`.
///
/// Draw order is fixed (weights first, then like-probabilities group by
/// group) on the stream tagged `("model")`.
///
/// # Errors
///
/// `Argument` when `r` is outside `1..=k` or `k < 2`.
pub fn gen_model(k: usize, r: usize, seed: u64) -> Result<PopulationModel> {
    if k < 2 {
        return Err(Error::Argument(format!("need at least 2 items, got {k}")));
    }
    if r < 1 || r > k {
        return Err(Error::Argument(format!("rank {r} outside 1..={k}")));
    }
    let mut rng = rng_from(seed, &["model"]);
    let raw: Vec<f64> = (0..r).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let p: Vec<f64> = if total > 0.0 {
        raw.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / r as f64; r]
    };
    let u: Vec<Vec<f64>> = (0..r).map(|_| (0..k).map(|_| rng.gen::<f64>()).collect()).collect();
    PopulationModel::new(p, u)
}

/// Builds a [`PopulationModel`] from a binary `users×K` rating table and
/// per-user group labels.
///
/// Groups are ordered by first appearance in the user list. Group `g`
/// receives weight `|g| / users`, and its like-probability for item `i`
/// is the mean rating of `i` among its users.
///
/// # Errors
///
/// `Argument` when there are no users; `Dimension` when the label count
/// disagrees with the row count; `Data` when a rating is not exactly 0
/// or 1 (or the table fails model validation, e.g. fewer than 2 items).
pub fn ingest_ratings(ratings: &Matrix, groups: &[String]) -> Result<PopulationModel> {
    let users = ratings.rows();
    let k = ratings.cols();
    if users == 0 {
        return Err(Error::Argument("rating table has no users".into()));
    }
    if groups.len() != users {
        return Err(Error::Dimension(format!(
            "{} group labels for {users} rating rows",
            groups.len()
        )));
    }
    for row in 0..users {
        for col in 0..k {
            let v = ratings.get(row, col);
            if v != 0.0 && v != 1.0 {
                return Err(Error::Data(format!(
                    "rating ({row},{col}) = {v} is not binary"
                )));
            }
        }
    }
    // Group labels in order of first appearance.
    let mut order: Vec<&str> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (row, label) in groups.iter().enumerate() {
        match order.iter().position(|g| g == label) {
            Some(g) => members[g].push(row),
            None => {
                order.push(label);
                members.push(vec![row]);
            }
        }
    }
    let p: Vec<f64> = members.iter().map(|m| m.len() as f64 / users as f64).collect();
    let u: Vec<Vec<f64>> = members
        .iter()
        .map(|m| {
            (0..k)
                .map(|i| m.iter().map(|&row| ratings.get(row, i)).sum::<f64>() / m.len() as f64)
                .collect()
        })
        .collect();
    PopulationModel::new(p, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::singular_extremes;
    use crate::model::{build_loss_matrix, optimal_pair};
    use crate::seed::derive_seed;

    /// Numerical rank: singular values above 1e-9 relative to the largest.
    fn numerical_rank(m: &Matrix) -> usize {
        use nalgebra::DMatrix;
        let d = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j));
        let sv = d.singular_values();
        let peak = sv.iter().cloned().fold(0.0_f64, f64::max);
        sv.iter().filter(|&&s| s > 1e-9 * peak).count()
    }

    // -------------------------------------------------------- gen_synthetic

    #[test]
    fn synthetic_instances_satisfy_all_invariants() {
        // LossMatrix::from_matrix re-validates symmetry, range, and PSD on
        // every accepted draw, so surviving construction is itself the
        // invariant check; rank and normalization are asserted on top.
        for (k, r, seed) in [
            (5usize, 2usize, 11u64),
            (8, 3, 12),
            (12, 2, 13),
            (20, 5, 14),
            (20, 2, 15),
            (40, 4, 16),
        ] {
            let l = gen_synthetic(k, r, seed).unwrap();
            let m = l.matrix();
            assert_eq!(numerical_rank(m), r, "K={k} r={r}");
            let peak = m.data().iter().cloned().fold(0.0_f64, f64::max);
            assert_eq!(peak, 1.0, "max entry must be exactly 1 at K={k} r={r}");
        }
    }

    #[test]
    fn synthetic_optimum_is_off_diagonal() {
        for seed in 0..10u64 {
            let l = gen_synthetic(15, 3, derive_seed(404, &["offdiag", &seed.to_string()])).unwrap();
            let (i, j, _) = optimal_pair(&l);
            assert_ne!(i, j, "optimal pair must be two distinct items");
        }
    }

    #[test]
    fn full_rank_request_is_honored() {
        let l = gen_synthetic(6, 6, 21).unwrap();
        assert_eq!(numerical_rank(l.matrix()), 6);
    }

    #[test]
    fn rank_one_always_fails_the_rejection_test() {
        // min entry of x xᵀ is the squared smallest coordinate, on the
        // diagonal, for every draw: the redraw cap must trip.
        assert!(matches!(gen_synthetic(10, 1, 3), Err(Error::Data(_))));
    }

    #[test]
    fn synthetic_rejects_bad_shapes() {
        assert!(matches!(gen_synthetic(1, 1, 0), Err(Error::Argument(_))));
        assert!(matches!(gen_synthetic(5, 0, 0), Err(Error::Argument(_))));
        assert!(matches!(gen_synthetic(5, 6, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn synthetic_is_seed_deterministic() {
        let a = gen_synthetic(30, 2, 77).unwrap();
        let b = gen_synthetic(30, 2, 77).unwrap();
        assert_eq!(a.matrix().data(), b.matrix().data(), "same seed, same matrix");
        let c = gen_synthetic(30, 2, 78).unwrap();
        assert_ne!(a.matrix().data(), c.matrix().data(), "fresh seed, fresh draw");
    }

    #[test]
    fn synthetic_is_bit_exactly_symmetric() {
        let l = gen_synthetic(25, 3, 9).unwrap();
        let m = l.matrix();
        for i in 0..25 {
            for j in 0..25 {
                assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
            }
        }
    }

    // ------------------------------------------------------------ gen_model

    #[test]
    fn generated_model_induces_a_low_rank_loss() {
        let model = gen_model(12, 3, 5).unwrap();
        assert_eq!(model.num_items(), 12);
        assert_eq!(model.num_groups(), 3);
        let l = build_loss_matrix(&model);
        assert!(numerical_rank(l.matrix()) <= 3);
        let (sigma_max, _) = singular_extremes(l.matrix());
        assert!(sigma_max > 0.0, "generic model must not be the zero matrix");
    }

    #[test]
    fn generated_model_is_seed_deterministic() {
        assert_eq!(gen_model(8, 2, 42).unwrap(), gen_model(8, 2, 42).unwrap());
        assert_ne!(gen_model(8, 2, 42).unwrap(), gen_model(8, 2, 43).unwrap());
    }

    // ------------------------------------------------------- ingest_ratings

    fn table(rows: &[&[f64]]) -> Matrix {
        Matrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_group_of_all_ones() {
        let model =
            ingest_ratings(&table(&[&[1.0, 1.0], &[1.0, 1.0]]), &labels(&["g", "g"])).unwrap();
        assert_eq!(model.weights(), &[1.0]);
        assert_eq!(model.likes(), &[vec![1.0, 1.0]]);
    }

    #[test]
    fn complementary_groups_split_evenly() {
        let ratings = table(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let model = ingest_ratings(&ratings, &labels(&["f", "f", "m", "m"])).unwrap();
        assert_eq!(model.weights(), &[0.5, 0.5]);
        assert_eq!(model.likes(), &[vec![1.0, 1.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn toy_table_matches_hand_computed_means() {
        // Group a: rows [1,0] and [1,1] → means [1.0, 0.5].
        // Group b: rows [0,0] and [0,1] → means [0.0, 0.5].
        let ratings = table(&[&[1.0, 0.0], &[1.0, 1.0], &[0.0, 0.0], &[0.0, 1.0]]);
        let model = ingest_ratings(&ratings, &labels(&["a", "a", "b", "b"])).unwrap();
        assert_eq!(model.weights(), &[0.5, 0.5]);
        assert_eq!(model.likes(), &[vec![1.0, 0.5], vec![0.0, 0.5]]);
    }

    #[test]
    fn groups_are_ordered_by_first_appearance() {
        let ratings = table(&[&[0.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]]);
        let model = ingest_ratings(&ratings, &labels(&["z", "a", "z"])).unwrap();
        // "z" appears first, so it is group 0 despite sorting after "a".
        assert_eq!(model.weights(), &[2.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(model.likes()[0], vec![0.0, 0.5]);
        assert_eq!(model.likes()[1], vec![1.0, 1.0]);
    }

    #[test]
    fn ingest_rejects_bad_input() {
        let ratings = table(&[&[1.0, 0.5]]);
        assert!(matches!(
            ingest_ratings(&ratings, &labels(&["g"])),
            Err(Error::Data(_))
        ));
        let ok = table(&[&[1.0, 0.0]]);
        assert!(matches!(
            ingest_ratings(&ok, &labels(&["g", "h"])),
            Err(Error::Dimension(_))
        ));
        let empty = Matrix::zeros(0, 2);
        assert!(matches!(ingest_ratings(&empty, &[]), Err(Error::Argument(_))));
    }

    #[test]
    fn ingested_model_builds_a_valid_loss_matrix() {
        let ratings = table(&[
            &[1.0, 0.0, 1.0, 0.0],
            &[1.0, 1.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0, 1.0],
            &[0.0, 1.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 1.0],
        ]);
        let model =
            ingest_ratings(&ratings, &labels(&["a", "a", "b", "b", "c"])).unwrap();
        let l = build_loss_matrix(&model);
        assert!(numerical_rank(l.matrix()) <= 3);
        assert_eq!(l.side(), 4);
    }
}
