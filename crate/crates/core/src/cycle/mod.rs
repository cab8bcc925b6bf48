//! Red/blue colorings of an even cycle and the lazy walk's color mixing.
//!
//! Positions of midpoints are measured in half-units: `2v` is vertex `v`
//! and `2v + 1` is the edge from `v` to `v + 1`.

mod analysis;
mod bounds;
mod coloring;
mod decompose;
mod walk;

pub use analysis::{analyze_cycle, CycleAnalysis, SetSummary};
pub use bounds::{
    chebyshev_time, check_red_dominance, check_red_dominance_with_sets, gambler_moments, lazy_exit_time_moments,
    DominanceReport, Moments, Nearest, SetNearest,
};
pub use coloring::{Color, Coloring, HalfPosition};
pub use decompose::{
    alternating_decomposition, chain_gap, compute_k, decomposition_start, exists_alternating_partition,
    is_alternating_partition, max_gap, midpoints, pair_midpoints, AlternatingSet,
};
pub use walk::{
    color_separation_series, coverage_time_tail, coverage_time_tail_with_sets, distance_implies_coverage,
    exact_color_separation, lazy_cycle_kernel, midpoint_coverage_tail, paired_coverage_time_tail,
    red_probability_series, reflection_balance, vertex_count_tail, Balance, CoverageState,
};
