//! The two query interfaces every algorithm consumes, plus call accounting.
//!
//! A deterministic oracle reveals `L[i,j]` exactly; a stochastic oracle
//! reveals one `Bernoulli(L[i,j])` draw per call. Both count every call into
//! an [`OracleStats`], keyed by unordered pair, which is what the query-bound
//! checks and the budget accounting read. Oracles never cache: a repeated
//! query is a repeated call. (The deterministic algorithm layers its own
//! cache on top so its bound counts distinct entries.)

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::LossMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Index into triangular storage for the unordered pair `{i, j}` of a K×K
/// matrix, with `i ≤ j` after normalization.
#[inline]
pub(crate) fn pair_slot(i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < k && j < k);
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    // Row-major upper triangle including the diagonal: lo*k − lo(lo−1)/2
    // offsets past the first lo rows, written underflow-free.
    lo * (2 * k - lo + 1) / 2 + (hi - lo)
}

/// Per-oracle call counts: a total and one counter per unordered pair.
#[derive(Debug, Clone)]
pub struct OracleStats {
    side: usize,
    total: u64,
    counts: Vec<u64>,
}

impl OracleStats {
    fn new(side: usize) -> Self {
        Self { side, total: 0, counts: vec![0; side * (side + 1) / 2] }
    }

    fn record(&mut self, i: usize, j: usize) {
        self.total += 1;
        self.counts[pair_slot(i, j, self.side)] += 1;
    }

    pub fn total_calls(&self) -> u64 {
        self.total
    }

    /// Calls made on the unordered pair `{i, j}`.
    pub fn count(&self, i: usize, j: usize) -> u64 {
        assert!(i < self.side && j < self.side, "pair ({i},{j}) out of range");
        self.counts[pair_slot(i, j, self.side)]
    }

    /// Number of unordered pairs touched at least once.
    pub fn distinct_pairs(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Sum of all per-pair counts; equals `total_calls` by construction and
    /// is exposed so tests can assert exactly that.
    pub fn sum_of_counts(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Exact-entry oracle over a loss matrix.
#[derive(Debug, Clone)]
pub struct DeterministicOracle {
    l: Matrix,
    stats: OracleStats,
}

impl DeterministicOracle {
    pub fn new(l: &LossMatrix) -> Self {
        Self { l: l.matrix().clone(), stats: OracleStats::new(l.side()) }
    }

    /// Side length K of the underlying matrix.
    pub fn side(&self) -> usize {
        self.l.rows()
    }

    /// Returns `L[i,j]` exactly and records the call.
    pub fn query(&mut self, i: usize, j: usize) -> f64 {
        self.stats.record(i, j);
        self.l.get(i, j)
    }

    pub fn stats(&self) -> &OracleStats {
        &self.stats
    }
}

/// Bernoulli oracle over a symmetric matrix of probabilities.
///
/// The matrix needs entries in [0,1] and symmetry so the unordered pair
/// `{i,j}` has one well-defined success probability; positive
/// semi-definiteness is not required by the sampling itself, which lets
/// validation harnesses drive the elimination machinery with hand-built
/// instances. Use [`StochasticOracle::from_loss`] for the usual case.
#[derive(Debug, Clone)]
pub struct StochasticOracle {
    probs: Matrix,
    stats: OracleStats,
    rng: ChaCha8Rng,
}

impl StochasticOracle {
    /// Builds an oracle over an arbitrary symmetric probability matrix.
    pub fn new(probs: &Matrix, seed: u64) -> Result<Self> {
        if !probs.is_square() {
            return Err(Error::Dimension(format!(
                "probability matrix must be square, got {}x{}",
                probs.rows(),
                probs.cols()
            )));
        }
        let k = probs.rows();
        for i in 0..k {
            for j in i..k {
                let v = probs.get(i, j);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Data(format!("entry ({i},{j}) = {v} outside [0,1]")));
                }
                if (v - probs.get(j, i)).abs() > 1e-12 {
                    return Err(Error::Data(format!(
                        "asymmetry at ({i},{j}): {v} vs {}",
                        probs.get(j, i)
                    )));
                }
            }
        }
        Ok(Self {
            probs: probs.clone(),
            stats: OracleStats::new(k),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn from_loss(l: &LossMatrix, seed: u64) -> Self {
        Self::new(l.matrix(), seed).expect("a validated loss matrix is a probability matrix")
    }

    pub fn side(&self) -> usize {
        self.probs.rows()
    }

    /// One `Bernoulli(L[i,j])` draw; records the call.
    pub fn query(&mut self, i: usize, j: usize) -> u8 {
        self.stats.record(i, j);
        u8::from(self.rng.gen::<f64>() < self.probs.get(i, j))
    }

    pub fn stats(&self) -> &OracleStats {
        &self.stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_loss_matrix, PopulationModel, simulate_round};
    use crate::seed::rng_from;

    fn model() -> PopulationModel {
        PopulationModel::new(
            vec![0.25, 0.75],
            vec![vec![0.9, 0.3, 0.5], vec![0.2, 0.7, 0.4]],
        )
        .unwrap()
    }

    // -------------------------------------------------------------- counting

    #[test]
    fn stats_count_unordered_pairs() {
        let l = build_loss_matrix(&model());
        let mut oracle = DeterministicOracle::new(&l);
        oracle.query(0, 1);
        oracle.query(1, 0);
        oracle.query(2, 2);
        assert_eq!(oracle.stats().total_calls(), 3);
        assert_eq!(oracle.stats().count(0, 1), 2);
        assert_eq!(oracle.stats().count(1, 0), 2);
        assert_eq!(oracle.stats().count(2, 2), 1);
        assert_eq!(oracle.stats().distinct_pairs(), 2);
        assert_eq!(oracle.stats().sum_of_counts(), oracle.stats().total_calls());
    }

    #[test]
    fn deterministic_oracle_is_symmetric_and_exact() {
        let l = build_loss_matrix(&model());
        let mut oracle = DeterministicOracle::new(&l);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(oracle.query(i, j), l.matrix().get(i, j));
                assert_eq!(oracle.query(i, j), oracle.query(j, i));
            }
        }
        // Diagonal queries are legal and exact.
        assert_eq!(oracle.query(1, 1), l.matrix().get(1, 1));
    }

    // ------------------------------------------------------------ stochastic

    #[test]
    fn stochastic_oracle_is_deterministic_at_entry_extremes() {
        let probs =
            Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let mut oracle = StochasticOracle::new(&probs, 11).unwrap();
        for _ in 0..64 {
            assert_eq!(oracle.query(0, 0), 0);
            assert_eq!(oracle.query(0, 1), 1);
        }
    }

    #[test]
    fn stochastic_oracle_mean_tracks_entry() {
        let l = build_loss_matrix(&model());
        let mut oracle = StochasticOracle::from_loss(&l, 17);
        let n = 100_000;
        let mut sum = 0u64;
        for _ in 0..n {
            sum += u64::from(oracle.query(0, 1));
        }
        let mean = sum as f64 / n as f64;
        let expect = l.matrix().get(0, 1);
        assert!((mean - expect).abs() < 0.01, "mean {mean} vs entry {expect}");
    }

    #[test]
    fn stochastic_oracle_rejects_invalid_matrices() {
        let asym = Matrix::new(2, 2, vec![0.1, 0.2, 0.3, 0.1]).unwrap();
        assert!(StochasticOracle::new(&asym, 0).is_err());
        let out_of_range = Matrix::new(2, 2, vec![0.1, 1.2, 1.2, 0.1]).unwrap();
        assert!(StochasticOracle::new(&out_of_range, 0).is_err());
    }

    #[test]
    fn same_seed_same_sample_path() {
        let l = build_loss_matrix(&model());
        let mut a = StochasticOracle::from_loss(&l, 123);
        let mut b = StochasticOracle::from_loss(&l, 123);
        for _ in 0..256 {
            assert_eq!(a.query(0, 2), b.query(0, 2));
        }
    }

    // -------------------------------------- agreement with the round game

    #[test]
    fn oracle_and_simulated_round_have_equal_means() {
        // 1 − simulate_round(i,j) and a stochastic oracle draw on {i,j} are
        // both Bernoulli(L[i,j]); compare the two empirical proportions with
        // a two-sample z-test at alpha = 0.001 (|z| < 3.2905).
        let model = model();
        let l = build_loss_matrix(&model);
        let n = 100_000u64;
        let mut sim_rng = rng_from(7, &["sim"]);
        let mut failures = 0u64;
        for _ in 0..n {
            failures += u64::from(1 - simulate_round(&model, 1, 2, &mut sim_rng));
        }
        let mut oracle = StochasticOracle::from_loss(&l, 29);
        let mut ones = 0u64;
        for _ in 0..n {
            ones += u64::from(oracle.query(1, 2));
        }
        let p1 = failures as f64 / n as f64;
        let p2 = ones as f64 / n as f64;
        let pooled = (failures + ones) as f64 / (2 * n) as f64;
        let se = (pooled * (1.0 - pooled) * 2.0 / n as f64).sqrt();
        let z = (p1 - p2) / se;
        assert!(z.abs() < 3.2905, "proportion z-statistic {z} (p1={p1}, p2={p2})");
    }
}
