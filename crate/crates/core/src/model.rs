//! Preference models: population mixtures, the loss/reward matrices they
//! induce, and single-round reward simulation.
//!
//! # The model
//!
//! A population of users splits into `r` groups; group `k` occurs with
//! probability `p_k` and likes item `i` independently with probability
//! `u_k[i]`. When a pair of items `(i, j)` is shown to a random user, the
//! round is a success if the user likes at least one of the two. The failure
//! probability of the pair is therefore
//!
//! ```text
//! L[i,j] = Σ_k p_k (1 − u_k[i]) (1 − u_k[j])
//! ```
//!
//! which makes `L` a sum of `r` rank-1 outer products: symmetric, positive
//! semi-definite, rank at most `r`, with entries in [0,1]. The reward matrix
//! is its complement `R = 1 − L`. The best pair minimizes `L` over unordered
//! pairs, the diagonal included: showing the same item twice is a legal
//! (if degenerate) action.
//!
//! All randomized algorithms interact with the model only through one of two
//! oracles (see [`crate::oracle`]): an exact entry oracle for the
//! deterministic setting, and a Bernoulli(L[i,j]) oracle for the stochastic
//! one.

use crate::error::{Error, Result};
use crate::matrix::{min_symmetric_eigenvalue, Matrix};
use rand::Rng;

/// Tolerance for the mixture weights summing to one.
const P_SUM_TOL: f64 = 1e-12;
/// Tolerance for symmetry of a loss matrix.
const SYMMETRY_TOL: f64 = 1e-12;
/// A loss matrix may dip this far below PSD from float rounding.
const PSD_TOL: f64 = -1e-10;

/// A mixture of `r` user groups over `K` items.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationModel {
    p: Vec<f64>,
    u: Vec<Vec<f64>>,
}

impl PopulationModel {
    /// Validates the mixture: `p` a probability vector (within 1e-12),
    /// every `u_k[i]` in [0,1], all groups over the same `K ≥ 2` items.
    pub fn new(p: Vec<f64>, u: Vec<Vec<f64>>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Data("model needs at least one group".into()));
        }
        if p.len() != u.len() {
            return Err(Error::Data(format!(
                "{} mixture weights but {} like-probability vectors",
                p.len(),
                u.len()
            )));
        }
        for (k, &w) in p.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Data(format!("mixture weight p[{k}] = {w} is invalid")));
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > P_SUM_TOL {
            return Err(Error::Data(format!("mixture weights sum to {total}, expected 1")));
        }
        let k_items = u[0].len();
        if k_items < 2 {
            return Err(Error::Data(format!("need at least 2 items, got {k_items}")));
        }
        for (k, uk) in u.iter().enumerate() {
            if uk.len() != k_items {
                return Err(Error::Data(format!(
                    "group {k} rates {} items, expected {k_items}",
                    uk.len()
                )));
            }
            for (i, &v) in uk.iter().enumerate() {
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(Error::Data(format!(
                        "like-probability u[{k}][{i}] = {v} outside [0,1]"
                    )));
                }
            }
        }
        Ok(Self { p, u })
    }

    /// Number of items `K`.
    pub fn num_items(&self) -> usize {
        self.u[0].len()
    }

    /// Number of groups `r`.
    pub fn num_groups(&self) -> usize {
        self.p.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.p
    }

    pub fn likes(&self) -> &[Vec<f64>] {
        &self.u
    }
}

/// A validated K×K loss matrix: symmetric, PSD up to float rounding,
/// entries in [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    m: Matrix,
}

impl LossMatrix {
    /// Validates symmetry (1e-12), entry range, and PSD-ness (smallest
    /// eigenvalue ≥ −1e-10). Violations are data errors: loss matrices
    /// typically arrive from files.
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Data(format!(
                "loss matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let k = m.rows();
        for i in 0..k {
            for j in 0..k {
                let v = m.get(i, j);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Data(format!("loss entry ({i},{j}) = {v} outside [0,1]")));
                }
                if j > i && (v - m.get(j, i)).abs() > SYMMETRY_TOL {
                    return Err(Error::Data(format!(
                        "asymmetry at ({i},{j}): {v} vs {}",
                        m.get(j, i)
                    )));
                }
            }
        }
        let lambda_min = min_symmetric_eigenvalue(&m)?;
        if lambda_min < PSD_TOL {
            return Err(Error::Data(format!(
                "loss matrix is not PSD: smallest eigenvalue {lambda_min:e}"
            )));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    /// Side length `K`.
    pub fn side(&self) -> usize {
        self.m.rows()
    }
}

/// Assembles `L = Σ_k p_k (1−u_k)(1−u_k)ᵀ` from a validated model.
pub fn build_loss_matrix(model: &PopulationModel) -> LossMatrix {
    let k = model.num_items();
    let mut m = Matrix::zeros(k, k);
    // Accumulate the upper triangle and mirror it, so the result is
    // bit-exactly symmetric regardless of rounding inside the products.
    for (w, uk) in model.weights().iter().zip(model.likes()) {
        let dislike: Vec<f64> = uk.iter().map(|u| 1.0 - u).collect();
        for i in 0..k {
            let wi = w * dislike[i];
            if wi == 0.0 {
                continue;
            }
            for (j, &dj) in dislike.iter().enumerate().skip(i) {
                m.set(i, j, m.get(i, j) + wi * dj);
            }
        }
    }
    for i in 0..k {
        for j in i..k {
            // Rounding can push a sum of probabilities a few ulp past 1;
            // clamp so the entries stay valid Bernoulli parameters.
            let v = m.get(i, j).clamp(0.0, 1.0);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    LossMatrix::from_matrix(m).expect("model invariants guarantee a valid loss matrix")
}

/// The complement reward matrix `R = 1 − L`.
pub fn build_reward_matrix(l: &LossMatrix) -> Matrix {
    Matrix::from_fn(l.side(), l.side(), |i, j| 1.0 - l.matrix().get(i, j))
}

/// The pair `(i ≤ j)` minimizing `L[i,j]` over all unordered pairs,
/// diagonal included, ties broken lexicographically on `(i, j)`.
pub fn optimal_pair(l: &LossMatrix) -> (usize, usize, f64) {
    optimal_pair_of(l.matrix())
}

/// Same scan for an arbitrary square matrix (used on estimated matrices,
/// whose entries may stray slightly outside [0,1]).
pub fn optimal_pair_of(m: &Matrix) -> (usize, usize, f64) {
    assert!(m.is_square(), "pair scan needs a square matrix");
    let k = m.rows();
    let mut best = (0usize, 0usize, m.get(0, 0));
    for i in 0..k {
        for j in i..k {
            let v = m.get(i, j);
            // Strict < keeps the lexicographically first minimizer.
            if v < best.2 {
                best = (i, j, v);
            }
        }
    }
    best
}

/// Plays one round of the pair game under the stochastic model: draws a
/// group `Z ~ p`, then per-item likes `y_i ~ Bern(u_Z[i])`,
/// `y_j ~ Bern(u_Z[j])`, and returns `max(y_i, y_j)`. The mean over draws is
/// `R[i,j]`.
pub fn simulate_round(
    model: &PopulationModel,
    i: usize,
    j: usize,
    rng: &mut impl Rng,
) -> u8 {
    let k = model.num_items();
    assert!(i < k && j < k, "item index out of range");
    // Categorical draw by inverse CDF; the final group absorbs any float
    // slack in the cumulative sum.
    let toss: f64 = rng.gen();
    let mut z = model.num_groups() - 1;
    let mut acc = 0.0;
    for (g, w) in model.weights().iter().enumerate() {
        acc += w;
        if toss < acc {
            z = g;
            break;
        }
    }
    let u = &model.likes()[z];
    let yi = rng.gen::<f64>() < u[i];
    let yj = rng.gen::<f64>() < u[j];
    u8::from(yi || yj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{norm, NormKind};
    use crate::seed::rng_from;

    fn two_group_model() -> PopulationModel {
        PopulationModel::new(vec![0.5, 0.5], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    // ------------------------------------------------------------ validation

    #[test]
    fn model_validation_catches_bad_inputs() {
        assert!(matches!(PopulationModel::new(vec![], vec![]), Err(Error::Data(_))));
        assert!(matches!(
            PopulationModel::new(vec![0.4, 0.4], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
            Err(Error::Data(_))
        ));
        assert!(matches!(
            PopulationModel::new(vec![1.0], vec![vec![0.5, 1.5]]),
            Err(Error::Data(_))
        ));
        assert!(matches!(
            PopulationModel::new(vec![1.0], vec![vec![0.5]]),
            Err(Error::Data(_))
        ));
        assert!(matches!(
            PopulationModel::new(vec![0.5, 0.5], vec![vec![0.5, 0.5], vec![0.5]]),
            Err(Error::Data(_))
        ));
    }

    // ------------------------------------------------------ build_loss_matrix

    #[test]
    fn all_ones_likes_give_zero_loss() {
        let m = PopulationModel::new(vec![1.0], vec![vec![1.0, 1.0, 1.0]]).unwrap();
        let l = build_loss_matrix(&m);
        assert_eq!(l.matrix(), &Matrix::zeros(3, 3));
    }

    #[test]
    fn all_zero_likes_give_all_ones_loss() {
        let m = PopulationModel::new(vec![1.0], vec![vec![0.0, 0.0, 0.0]]).unwrap();
        let l = build_loss_matrix(&m);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.matrix().get(i, j), 1.0);
            }
        }
    }

    #[test]
    fn two_group_loss_by_hand() {
        // Groups dislike exactly one item each: L = 0.5·e₂e₂ᵀ + 0.5·e₁e₁ᵀ.
        let l = build_loss_matrix(&two_group_model());
        let expect = Matrix::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let diff = norm(&l.matrix().sub(&expect).unwrap(), NormKind::Max);
        assert!(diff < 1e-15, "difference {diff}");
    }

    #[test]
    fn reward_is_elementwise_complement() {
        let l = build_loss_matrix(&two_group_model());
        let r = build_reward_matrix(&l);
        assert_eq!(r.get(0, 0), 0.5);
        assert_eq!(r.get(0, 1), 1.0);
        assert_eq!(r.get(1, 1), 0.5);
    }

    // ---------------------------------------------------------- optimal_pair

    #[test]
    fn optimal_pair_prefers_off_diagonal_minimum() {
        let l = build_loss_matrix(&two_group_model());
        assert_eq!(optimal_pair(&l), (0, 1, 0.0));
    }

    #[test]
    fn optimal_pair_tie_breaks_lexicographically() {
        let l = LossMatrix::from_matrix(Matrix::zeros(3, 3)).unwrap();
        assert_eq!(optimal_pair(&l), (0, 0, 0.0));
    }

    #[test]
    fn optimal_pair_matches_exhaustive_scan() {
        // Independent brute force over all i ≤ j on a random-ish PSD matrix.
        let a = [0.9, 0.15, 0.47, 0.66, 0.28, 0.71, 0.05, 0.83, 0.39, 0.52];
        let b = [0.33, 0.78, 0.12, 0.9, 0.41, 0.06, 0.64, 0.27, 0.88, 0.19];
        let raw = Matrix::from_fn(10, 10, |i, j| (a[i] * a[j] + b[i] * b[j]) / 2.0);
        let l = LossMatrix::from_matrix(raw).unwrap();
        let got = optimal_pair(&l);
        let mut best = (0, 0, l.matrix().get(0, 0));
        for i in 0..10 {
            for j in i..10 {
                if l.matrix().get(i, j) < best.2 {
                    best = (i, j, l.matrix().get(i, j));
                }
            }
        }
        assert_eq!(got, best);
    }

    // --------------------------------------------------------- simulate_round

    #[test]
    fn simulate_round_is_constant_at_extremes() {
        let sure = PopulationModel::new(vec![1.0], vec![vec![1.0, 1.0]]).unwrap();
        let never = PopulationModel::new(vec![1.0], vec![vec![0.0, 0.0]]).unwrap();
        let mut rng = rng_from(1, &["extremes"]);
        for _ in 0..64 {
            assert_eq!(simulate_round(&sure, 0, 1, &mut rng), 1);
            assert_eq!(simulate_round(&never, 0, 1, &mut rng), 0);
        }
    }

    #[test]
    fn simulate_round_mean_matches_reward_matrix() {
        let model = PopulationModel::new(
            vec![0.3, 0.7],
            vec![vec![0.8, 0.2, 0.5], vec![0.1, 0.6, 0.4]],
        )
        .unwrap();
        let r = build_reward_matrix(&build_loss_matrix(&model));
        let mut rng = rng_from(99, &["mc"]);
        let n = 100_000;
        let mut hits = 0u64;
        for _ in 0..n {
            hits += u64::from(simulate_round(&model, 0, 2, &mut rng));
        }
        let mean = hits as f64 / n as f64;
        let expect = r.get(0, 2);
        assert!(
            (mean - expect).abs() < 0.01,
            "empirical mean {mean} vs expected {expect}"
        );
    }

    #[test]
    fn identical_seeds_reproduce_rounds_exactly() {
        let model = two_group_model();
        let mut a = rng_from(5, &["rounds"]);
        let mut b = rng_from(5, &["rounds"]);
        let run_a: Vec<u8> = (0..256).map(|_| simulate_round(&model, 0, 1, &mut a)).collect();
        let run_b: Vec<u8> = (0..256).map(|_| simulate_round(&model, 0, 1, &mut b)).collect();
        assert_eq!(run_a, run_b);
    }
}
