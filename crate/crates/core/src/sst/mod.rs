//! Strong stationary time checks by exhaustive path enumeration, a seeded
//! Monte-Carlo fallback, and closed-form oracles.

mod check;
mod family;
mod oracles;
mod path;
mod predicate;
mod sample;

pub use check::{check_strong_stationarity, conditional_statistic_distribution, CheckOptions, Restriction, SstReport};
pub use family::ChainFamily;
pub use oracles::{
    count_nonnegative_paths, counterexample, prob_k_distinct, prob_strings_distinct, walk1_position_distribution,
    CounterexampleReport,
};
pub use path::{enumerate_paths, Path, PathSteps};
pub use predicate::{PathPrefix, PredicateKind};
pub use sample::{sample_strong_stationarity, Estimate, SampleOptions, SampleReport, ValueEstimate};
