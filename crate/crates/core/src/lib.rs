//! Epistemic voting: how large should a congress be?
//!
//! Voters decide a binary question with one correct answer; voter `i` is
//! right with probability `p_i`. A congress of the `k` most competent voters
//! decides by strict majority. This crate computes
//!
//! * exact Poisson-binomial distributions of the number of correct votes
//!   ([`poisson_binomial`]),
//! * competence distributions and sorted profiles ([`competence`]),
//! * the accuracy-maximizing congress size and its linear brackets
//!   ([`optimal_size`]),
//! * the gain of a congress over direct democracy, exactly or by seeded
//!   Monte Carlo, and the sufficient conditions for its sign ([`gain`]),
//! * the log-log regression of real legislature sizes on population
//!   ([`empirics`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod competence;
pub mod empirics;
pub mod error;
pub mod gain;
pub mod optimal_size;
pub mod poisson_binomial;
pub mod quadrature;
pub mod rng;

pub use competence::{CompetenceDistribution, CompetenceProfile, ProfileSource};
pub use error::{Error, ErrorClass, Result};
pub use gain::{GainEstimate, GainMethod, SimulationMode};
pub use optimal_size::{optimal_k, OptimalSizeResult};
pub use poisson_binomial::{PoissonBinomialPmf, SuccessProbVector};

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_240_601;
