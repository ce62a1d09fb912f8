//! Active preference learning over item pairs via adaptive low-rank matrix
//! completion.
//!
//! A population of raters is summarized by a symmetric positive semidefinite
//! loss matrix `L` over `K` items: `L[i,j]` is the probability that a rater
//! drawn from the population dislikes both item `i` and item `j`. When rater
//! behaviour is driven by `r` latent subgroups, `L` has rank at most `r`,
//! and the best pair to show (the one minimizing the double-dislike
//! probability, equivalently maximizing the double-like complement) can be
//! found without measuring all `K(K+1)/2` pairs.
//!
//! This crate implements that program end to end:
//!
//! - [`plans`]: the deterministic algorithm. Given exact access to entries
//!   of `L`, it selects `r` energetically independent columns by a
//!   smallest-singular-value test, completes the matrix with a Nyström
//!   extension, and reads the best pair off the completion using at most
//!   `K(r+1)` distinct entry queries.
//! - [`se`]: successive elimination for choosing the next column when the
//!   entries are only observable as Bernoulli draws, with matrix Bernstein
//!   confidence radii.
//! - [`rplans`]: the stochastic algorithm, combining the elimination
//!   contests with a final estimation phase whose per-entry sample counts
//!   come from explicit concentration bounds, plus a budgeted variant.
//! - [`baselines`]: uniform allocation, a best-arm identification algorithm
//!   with law-of-iterated-logarithm radii, and pairwise successive
//!   elimination, all treating pairs as independent arms.
//! - [`oracle`]: exact and Bernoulli entry oracles with query accounting.
//! - [`model`], [`synth`]: population models, loss-matrix construction, and
//!   synthetic instance generators.
//! - [`sweep`], [`validate`]: an experiment harness and Monte Carlo checks
//!   of the concentration tools.
//! - [`io`]: plain-text readers and writers for matrices, models, and
//!   ratings data.
//!
//! Everything downstream of a seed is deterministic: the same inputs and the
//! same `u64` seed reproduce every query, every estimate, and every output
//! byte, on any platform.

pub mod baselines;
pub mod error;
pub mod io;
pub mod matrix;
pub mod model;
pub mod oracle;
pub mod plans;
pub mod rplans;
pub mod se;
pub mod seed;
pub mod sweep;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
pub use matrix::{IndexSet, Matrix, NormKind};
pub use model::{LossMatrix, PopulationModel};
pub use oracle::{DeterministicOracle, OracleStats, StochasticOracle};
pub use plans::{run_plans, PlansResult};
pub use rplans::{run_rplans, run_rplans_budget, RPlansResult};
