//! Exact mixing analysis for statistics of finite Markov chains.
//!
//! The crate computes how the law of a statistic `f(X_t)` approaches its
//! stationary pushforward in separation distance, and checks candidate
//! strong stationary times for such statistics by exhaustive path
//! enumeration with exact rational arithmetic.
//!
//! Modules:
//!
//! * [`dist`]: finite distributions, transition kernels, separation and
//!   total variation distance, pushforward and exact evolution.
//! * [`shuffle`]: decks, the random-to-top, top-to-bottom mixture and
//!   inverse riffle chains, and a catalog of deck statistics.
//! * [`sst`]: path enumeration, path predicates, the strong stationarity
//!   checker and closed-form oracles.
//! * [`cycle`]: red/blue colorings of an even cycle, alternating-set
//!   decompositions, midpoint-coverage stopping times and the lazy walk's
//!   color mixing.
//!
//! Heavy loops take an [`Exec`] argument. With the default `parallel`
//! feature they fan out over rayon; results are identical either way.

pub mod cycle;
pub mod dist;
mod error;
mod exec;
pub mod rational;
pub mod shuffle;
pub mod sst;

pub use error::{Error, Result};
pub use exec::Exec;
pub use rational::Rational;

/// Default cap on the number of weighted branches an exact enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;
