use num_traits::Zero;
use serde::Serialize;

use super::coloring::{Color, Coloring};
use super::decompose::{alternating_decomposition, AlternatingSet};
use super::walk::red_probability_series;
use crate::rational::{ratio, Rational};
use crate::{Error, Result};

fn int(x: u64) -> Rational {
    Rational::from_integer(x.into())
}

/// Mean and variance of a gambler's-ruin style exit time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Moments {
    #[serde(with = "crate::rational::serde_str")]
    pub mean: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub variance: Rational,
}

impl Moments {
    /// `mean <= 8 k^2`.
    pub fn mean_within(&self, k: u64) -> bool {
        self.mean <= int(8 * k * k)
    }

    /// `sqrt(variance) <= (8 / sqrt 3) k^2`, compared exactly as `3 variance <= 64 k^4`.
    pub fn stdev_within(&self, k: u64) -> bool {
        &self.variance * int(3) <= int(64) * int(k).pow(4)
    }
}

/// Mean `2 d^2` and variance `(4/3)(d^4 - d^2)` with `d = 2k - 1`.
pub fn gambler_moments(k: u64) -> Result<Moments> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let d = int(2 * k - 1);
    let d2 = &d * &d;
    Ok(Moments {
        mean: int(2) * &d2,
        variance: ratio(4, 3) * (&d2 * &d2 - &d2),
    })
}

/// Exact moments of the time the lazy walk needs to get `d` steps from its start.
///
/// Each move of the simple walk costs a geometric number of lazy steps, so
/// the mean is `2 d^2` and the variance `(8/3) d^4 - (2/3) d^2`.
pub fn lazy_exit_time_moments(d: u64) -> Result<Moments> {
    if d == 0 {
        return Err(Error::param("d must be at least 1"));
    }
    let d2 = int(d * d);
    Ok(Moments {
        mean: int(2) * &d2,
        variance: ratio(8, 3) * &d2 * &d2 - ratio(2, 3) * &d2,
    })
}

/// `(8 + 8c / sqrt 3) k^2`.
pub fn chebyshev_time(k: u64, c: f64) -> Result<f64> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::param("c must be positive"));
    }
    Ok((8.0 + 8.0 * c / 3f64.sqrt()) * (k * k) as f64)
}

/// Nearest-member status of one alternating set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Nearest {
    Red,
    Blue,
    /// Equidistant nearest members of both colors.
    Ambiguous,
}

#[derive(Clone, Debug, Serialize)]
pub struct SetNearest {
    pub set: usize,
    pub distance: usize,
    pub members: Vec<usize>,
    pub status: Nearest,
}

/// Result of the red dominance check.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    pub x0: usize,
    pub horizon: usize,
    pub nearest: Vec<SetNearest>,
    pub precondition_holds: bool,
    /// Sets whose nearest member is blue or ambiguous.
    pub failing_sets: Vec<usize>,
    /// `P(red at t) >= 1/2` for every `t <= horizon`; only evaluated when the precondition holds.
    pub dominance_holds: Option<bool>,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub min_margin: Option<Rational>,
    pub first_violation: Option<usize>,
}

/// Nearest-member analysis and red dominance for the decomposition sets.
pub fn check_red_dominance(c: &Coloring, x0: usize, horizon: usize) -> Result<DominanceReport> {
    check_red_dominance_with_sets(c, x0, &alternating_decomposition(c), horizon)
}

/// [`check_red_dominance`] for an explicit family of sets.
pub fn check_red_dominance_with_sets(
    c: &Coloring,
    x0: usize,
    sets: &[AlternatingSet],
    horizon: usize,
) -> Result<DominanceReport> {
    if x0 >= c.size() {
        return Err(Error::param(format!("start vertex {x0} outside 0..{}", c.size())));
    }
    let nearest: Vec<SetNearest> = sets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let distance = s.vertices.iter().map(|&v| c.distance(x0, v)).min().unwrap_or(0);
            let members: Vec<usize> = s
                .vertices
                .iter()
                .copied()
                .filter(|&v| c.distance(x0, v) == distance)
                .collect();
            let status = match (
                members.iter().any(|&v| c.color(v) == Color::Red),
                members.iter().any(|&v| c.color(v) == Color::Blue),
            ) {
                (true, false) => Nearest::Red,
                (false, true) => Nearest::Blue,
                _ => Nearest::Ambiguous,
            };
            SetNearest { set: i, distance, members, status }
        })
        .collect();
    let failing_sets: Vec<usize> = nearest.iter().filter(|s| s.status != Nearest::Red).map(|s| s.set).collect();
    let precondition_holds = failing_sets.is_empty();
    let (mut dominance_holds, mut min_margin, mut first_violation) = (None, None, None);
    if precondition_holds {
        let half = ratio(1, 2);
        let series = red_probability_series(c, x0, horizon)?;
        let margins: Vec<Rational> = series.iter().map(|p| p - &half).collect();
        first_violation = margins.iter().position(|m| *m < Rational::zero());
        dominance_holds = Some(first_violation.is_none());
        min_margin = margins.into_iter().min();
    }
    Ok(DominanceReport {
        x0,
        horizon,
        nearest,
        precondition_holds,
        failing_sets,
        dominance_holds,
        min_margin,
        first_violation,
    })
}

impl DominanceReport {
    /// The smallest margin is never below zero.
    pub fn is_dominant(&self) -> bool {
        self.dominance_holds == Some(true)
    }
}
