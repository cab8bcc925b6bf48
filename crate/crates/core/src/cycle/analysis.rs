use serde::Serialize;

use super::coloring::{Coloring, HalfPosition};
use super::decompose::{alternating_decomposition, chain_gap, compute_k, max_gap, midpoints, AlternatingSet};
use super::walk::{
    color_separation_series, coverage_time_tail_with_sets, paired_coverage_time_tail, vertex_count_tail,
};
use crate::rational::Rational;
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct SetSummary {
    pub vertices: Vec<usize>,
    pub chain: Vec<usize>,
    pub max_gap: usize,
    pub chain_gap: usize,
    /// Midpoints in half-units.
    pub midpoints: Vec<HalfPosition>,
}

/// Everything the cycle experiment reports for one coloring and start vertex.
#[derive(Clone, Debug, Serialize)]
pub struct CycleAnalysis {
    pub coloring: Coloring,
    pub x0: usize,
    pub horizon: usize,
    pub k: usize,
    pub sets: Vec<SetSummary>,
    #[serde(with = "crate::rational::serde_vec_str")]
    pub separation: Vec<Rational>,
    #[serde(with = "crate::rational::serde_vec_str")]
    pub coverage_tail: Vec<Rational>,
    #[serde(with = "crate::rational::serde_vec_str")]
    pub paired_tail: Vec<Rational>,
    #[serde(with = "crate::rational::serde_vec_str")]
    pub vertex_count_tail: Vec<Rational>,
    /// `separation[t] <= coverage_tail[t]` for all `t`.
    pub coverage_bound_holds: bool,
    pub coverage_first_violation: Option<usize>,
    pub paired_bound_holds: bool,
    pub paired_first_violation: Option<usize>,
}

fn first_violation(sep: &[Rational], tail: &[Rational]) -> Option<usize> {
    sep.iter().zip(tail).position(|(s, t)| s > t)
}

/// Runs the separation series and every coverage tail up to `horizon`.
///
/// Uses the decomposition sets unless `sets` is given.
pub fn analyze_cycle(
    c: &Coloring,
    x0: usize,
    horizon: usize,
    sets: Option<Vec<AlternatingSet>>,
) -> Result<CycleAnalysis> {
    let sets = sets.unwrap_or_else(|| alternating_decomposition(c));
    let separation = color_separation_series(c, x0, horizon)?;
    let coverage_tail = coverage_time_tail_with_sets(c, x0, &sets, horizon)?;
    let paired_tail = paired_coverage_time_tail(c, x0, horizon)?;
    let coverage_first_violation = first_violation(&separation, &coverage_tail);
    let paired_first_violation = first_violation(&separation, &paired_tail);
    Ok(CycleAnalysis {
        coloring: c.clone(),
        x0,
        horizon,
        k: compute_k(c),
        sets: sets
            .iter()
            .map(|s| SetSummary {
                vertices: s.vertices.clone(),
                chain: s.chain.clone(),
                max_gap: max_gap(s, c.size()),
                chain_gap: chain_gap(s, c.size()),
                midpoints: midpoints(s, c.size()),
            })
            .collect(),
        vertex_count_tail: vertex_count_tail(c, x0, horizon)?,
        separation,
        coverage_tail,
        paired_tail,
        coverage_bound_holds: coverage_first_violation.is_none(),
        coverage_first_violation,
        paired_bound_holds: paired_first_violation.is_none(),
        paired_first_violation,
    })
}
