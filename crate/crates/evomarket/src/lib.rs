//! Evolutionary dynamics of non-durable consumer markets.
//!
//! Competing brands of one good reproduce through a sales-supply cycle:
//! revenue funds supply, supply meets consumer preference, and the brands'
//! unit sales follow a replicator dynamics driven by product fitness. Out of
//! that loop come the laws this crate simulates and verifies statistically:
//!
//! - the mean price decays exponentially toward a natural price while the
//!   market holds excess supply, at a rate set by the price variance across
//!   brands;
//! - individual prices fluctuate around the mean under a sign-restoring
//!   force, with a stationary Laplace (double-exponential) distribution;
//! - at market clearing the restoring force vanishes, the price distribution
//!   destabilizes and the mean price jumps upward until excess supply is
//!   restored;
//! - business-unit sizes become lognormal under i.i.d. fitness shocks and
//!   growth rates carry Laplace tails;
//! - a constant fitness advantage substitutes one brand for another along a
//!   logistic path;
//! - the reduced spot-price picture is a mean-reverting jump-diffusion,
//!   distinguishable from the full dynamics by its thin Gaussian tails.
//!
//! Every stochastic engine is cross-checked against the matching closed form
//! by the estimator layer and the acceptance suite.
//!
//! # Layout
//!
//! | module | contents |
//! |--------|----------|
//! | [`market`] | domain types, aggregates, time-scale bookkeeping |
//! | [`demand`] | demand quadratic, adopter diffusion, consumer density |
//! | [`supply`] | reproduction relation, inventory balance, shocks |
//! | [`replicator`] | fitness, replicator steps, substitution analysis |
//! | [`price`] | price-deviation dynamics, mean-price law, regime, jumps |
//! | [`bridge`] | Ornstein-Uhlenbeck and jump-diffusion reductions |
//! | [`estimators`] | Laplace/lognormal fits, Kolmogorov-Smirnov checks |
//! | [`sim`] | the coupled two-time-scale loop and ensemble runner |
//! | [`scenario`] | scenario files |
//! | [`timeseries`] | time-series persistence |
//! | [`plot`] | plot-data emission |
//!
//! The `examples/` directory holds one runnable example per capability; the
//! `evomarket` binary wraps the same entry points for batch use.

pub mod bridge;
pub mod cli;
pub mod demand;
pub mod error;
pub mod estimators;
pub mod market;
pub mod plot;
pub mod price;
pub mod replicator;
pub mod scenario;
pub mod sim;
pub mod supply;
pub mod timeseries;

pub use error::{Error, Result};
pub use market::{
    aggregate, new_scenario, scale_time, Aggregates, BrandState, HaltReason, JumpEvent,
    MarketParams, MarketState, Regime, Snapshot, Trajectory,
};
