use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::coloring::{Color, Coloring, HalfPosition};
use super::decompose::{alternating_decomposition, compute_k, midpoints, pair_midpoints, AlternatingSet};
use crate::dist::{evolve, push_forward, separation_distance, Distribution, Kernel};
use crate::rational::{ratio, ratio_big, Rational};
use crate::{Error, Exec, Result};

/// Lazy walk on the `size`-cycle: stay with probability 1/2, step either way with 1/4.
pub fn lazy_cycle_kernel(size: usize) -> Result<Kernel> {
    if size < 2 {
        return Err(Error::param(format!("cycle size {size} is below 2")));
    }
    Kernel::new(
        (0..size)
            .map(|v| {
                vec![
                    (v, ratio(1, 2)),
                    ((v + 1) % size, ratio(1, 4)),
                    ((v + size - 1) % size, ratio(1, 4)),
                ]
            })
            .collect(),
    )
}

fn check_vertex(c: &Coloring, x0: usize) -> Result<()> {
    if x0 >= c.size() {
        return Err(Error::param(format!("start vertex {x0} outside 0..{}", c.size())));
    }
    Ok(())
}

/// Separation of the walk's color at time `t` from `(1/2, 1/2)`, through the generic kernel route.
pub fn exact_color_separation(c: &Coloring, x0: usize, t: u64) -> Result<Rational> {
    check_vertex(c, x0)?;
    let kernel = lazy_cycle_kernel(c.size())?;
    let start = Distribution::point_mass(x0, 0..c.size())?;
    let law = evolve(&kernel, &start, t, Exec::Sequential)?;
    let colors = push_forward(&law, &|v: &usize| Some(c.color(*v)))?;
    let half = Distribution::uniform([Color::Red, Color::Blue])?;
    let colors = Distribution::new(half.support().iter().map(|col| (*col, colors.weight(col))))?;
    separation_distance(&colors, &half)
}

/// Integer weights of the walk's position: `counts[t][v] / 4^t = P(X_t = v)`.
fn position_counts(size: usize, x0: usize, horizon: usize) -> Vec<Vec<BigUint>> {
    let mut out = Vec::with_capacity(horizon + 1);
    let mut cur = vec![BigUint::zero(); size];
    cur[x0] = BigUint::one();
    for _ in 0..horizon {
        let next = (0..size)
            .map(|v| (&cur[v] << 1u32) + &cur[(v + 1) % size] + &cur[(v + size - 1) % size])
            .collect();
        out.push(std::mem::replace(&mut cur, next));
    }
    out.push(cur);
    out
}

/// `P(X_t is red)` for `t = 0..=horizon`.
pub fn red_probability_series(c: &Coloring, x0: usize, horizon: usize) -> Result<Vec<Rational>> {
    check_vertex(c, x0)?;
    Ok(position_counts(c.size(), x0, horizon)
        .into_iter()
        .enumerate()
        .map(|(t, counts)| {
            let red: BigUint = (0..c.size()).filter(|&v| c.color(v) == Color::Red).map(|v| &counts[v]).sum();
            ratio_big(red, BigUint::one() << (2 * t))
        })
        .collect())
}

/// Exact color separation for every `t = 0..=horizon`.
pub fn color_separation_series(c: &Coloring, x0: usize, horizon: usize) -> Result<Vec<Rational>> {
    let two = Rational::from_integer(2.into());
    Ok(red_probability_series(c, x0, horizon)?
        .into_iter()
        .map(|p| {
            let d = Rational::one() - &two * p;
            if d < Rational::zero() {
                -d
            } else {
                d
            }
        })
        .collect())
}

/// Offsets of the refined walk in half-units relative to its start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CoverageState {
    /// Smallest offset reached so far (`<= 0`).
    pub l: i64,
    /// Largest offset reached so far (`>= 0`).
    pub r: i64,
    /// Current offset.
    pub x: i64,
}

impl CoverageState {
    pub const START: CoverageState = CoverageState { l: 0, r: 0, x: 0 };

    fn step(self, dx: i64) -> CoverageState {
        let x = self.x + dx;
        CoverageState {
            l: self.l.min(x),
            r: self.r.max(x),
            x,
        }
    }
}

/// Which visited ranges stop the walk.
///
/// `covered[(-l) * span + r]` for offsets with `r - l < span`; any range of
/// `span` or more half-units covers the whole cycle.
struct Rule {
    span: i64,
    covered: Vec<bool>,
}

impl Rule {
    fn new(span: usize, hit: impl Fn(i64, i64) -> bool) -> Self {
        let span = span as i64;
        let mut covered = vec![true; (span * span) as usize];
        for nl in 0..span {
            for r in 0..span - nl {
                covered[(nl * span + r) as usize] = hit(-nl, r);
            }
        }
        Rule { span, covered }
    }

    fn stops(&self, s: CoverageState) -> bool {
        s.r - s.l >= self.span || self.covered[(-s.l * self.span + s.r) as usize]
    }
}

fn midpoint_rule(size: usize, x0: usize, groups: &[Vec<HalfPosition>]) -> Rule {
    let span = 2 * size;
    let mut mask = vec![Vec::new(); span];
    for (g, group) in groups.iter().enumerate() {
        for h in group {
            mask[h.0 % span].push(g);
        }
    }
    Rule::new(span, |l, r| {
        let mut hit = vec![false; groups.len()];
        for o in l..=r {
            let p = (2 * x0 as i64 + o).rem_euclid(span as i64) as usize;
            for &g in &mask[p] {
                hit[g] = true;
            }
        }
        hit.into_iter().all(|b| b)
    })
}

/// `P(T > t)` for `t = 0..=horizon`, where `T` is the first full step whose refined path has stopped.
fn tail(rule: &Rule, horizon: usize) -> Vec<Rational> {
    let mut alive: BTreeMap<CoverageState, BigUint> = BTreeMap::new();
    if !rule.stops(CoverageState::START) {
        alive.insert(CoverageState::START, BigUint::one());
    }
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(ratio_big(alive.values().sum(), BigUint::one()));
    for t in 1..=horizon {
        for _ in 0..2 {
            let mut next: BTreeMap<CoverageState, BigUint> = BTreeMap::new();
            for (s, w) in &alive {
                for dx in [-1, 1] {
                    let n = s.step(dx);
                    if !rule.stops(n) {
                        *next.entry(n).or_insert_with(BigUint::zero) += w;
                    }
                }
            }
            alive = next;
        }
        out.push(ratio_big(alive.values().sum(), BigUint::one() << (2 * t)));
        if alive.is_empty() {
            out.resize(horizon + 1, Rational::zero());
            break;
        }
    }
    out
}

/// Tail of the first time the refined walk has crossed at least one point of every group.
pub fn midpoint_coverage_tail(
    c: &Coloring,
    x0: usize,
    groups: &[Vec<HalfPosition>],
    horizon: usize,
) -> Result<Vec<Rational>> {
    check_vertex(c, x0)?;
    if groups.iter().any(|g| g.is_empty() || g.iter().any(|h| h.0 >= 2 * c.size())) {
        return Err(Error::param("midpoint groups must be nonempty and inside the cycle"));
    }
    Ok(tail(&midpoint_rule(c.size(), x0, groups), horizon))
}

/// `P(T > t)`: `T` is the first time the walk has crossed a midpoint of every decomposition set.
pub fn coverage_time_tail(c: &Coloring, x0: usize, horizon: usize) -> Result<Vec<Rational>> {
    coverage_time_tail_with_sets(c, x0, &alternating_decomposition(c), horizon)
}

/// [`coverage_time_tail`] for an explicit family of alternating sets.
pub fn coverage_time_tail_with_sets(
    c: &Coloring,
    x0: usize,
    sets: &[AlternatingSet],
    horizon: usize,
) -> Result<Vec<Rational>> {
    let groups: Vec<_> = sets.iter().map(|s| midpoints(s, c.size())).collect();
    midpoint_coverage_tail(c, x0, &groups, horizon)
}

/// Coverage tail where each red/blue pair of each decomposition set needs one of its two pair midpoints.
pub fn paired_coverage_time_tail(c: &Coloring, x0: usize, horizon: usize) -> Result<Vec<Rational>> {
    let groups: Vec<_> = alternating_decomposition(c)
        .iter()
        .flat_map(|s| pair_midpoints(s, c.size()))
        .collect();
    midpoint_coverage_tail(c, x0, &groups, horizon)
}

/// Tail of the first time the walk has visited at least `2k - 1` distinct vertices.
pub fn vertex_count_tail(c: &Coloring, x0: usize, horizon: usize) -> Result<Vec<Rational>> {
    check_vertex(c, x0)?;
    let need = (2 * compute_k(c) - 1).min(c.size()) as i64;
    let rule = Rule::new(2 * c.size(), |l, r| r.div_euclid(2) + (-l).div_euclid(2) + 1 >= need);
    Ok(tail(&rule, horizon))
}

/// Whether moving `2k - 1` vertices away from `x0` in either direction always crosses a midpoint of every set.
pub fn distance_implies_coverage(c: &Coloring, x0: usize, sets: &[AlternatingSet]) -> Result<bool> {
    check_vertex(c, x0)?;
    let groups: Vec<_> = sets.iter().map(|s| midpoints(s, c.size())).collect();
    let rule = midpoint_rule(c.size(), x0, &groups);
    let reach = 2 * (2 * compute_k(c) as i64 - 1);
    let at = |l: i64, r: i64| rule.stops(CoverageState { l, r, x: 0 });
    Ok(at(0, reach) && at(-reach, 0))
}

/// Probability of having stopped and then standing on a red or blue member, per time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Balance {
    #[serde(with = "crate::rational::serde_str")]
    pub red: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub blue: Rational,
}

/// For `t = 0..=horizon`: `P(T <= t, X_t in reds)` and `P(T <= t, X_t in blues)`.
///
/// `T` is the midpoint coverage time for `groups`. Equal values at every
/// `t` mean stopping does not favor either color within the members.
pub fn reflection_balance(
    c: &Coloring,
    x0: usize,
    groups: &[Vec<HalfPosition>],
    reds: &[usize],
    blues: &[usize],
    horizon: usize,
) -> Result<Vec<Balance>> {
    check_vertex(c, x0)?;
    let span = 2 * c.size();
    let rule = midpoint_rule(c.size(), x0, groups);
    let mut alive: BTreeMap<CoverageState, BigUint> = BTreeMap::new();
    let mut stopped = vec![BigUint::zero(); span];
    if rule.stops(CoverageState::START) {
        stopped[2 * x0] = BigUint::one();
    } else {
        alive.insert(CoverageState::START, BigUint::one());
    }
    let measure = |stopped: &[BigUint], t: usize| {
        let den = BigUint::one() << (2 * t);
        let sum = |vs: &[usize]| vs.iter().map(|&v| &stopped[2 * v]).sum::<BigUint>();
        Balance {
            red: ratio_big(sum(reds), den.clone()),
            blue: ratio_big(sum(blues), den),
        }
    };
    let mut out = vec![measure(&stopped, 0)];
    for t in 1..=horizon {
        for _ in 0..2 {
            let mut moved = vec![BigUint::zero(); span];
            for (p, w) in stopped.iter().enumerate() {
                if !w.is_zero() {
                    moved[(p + 1) % span] += w;
                    moved[(p + span - 1) % span] += w;
                }
            }
            let mut next: BTreeMap<CoverageState, BigUint> = BTreeMap::new();
            for (s, w) in &alive {
                for dx in [-1, 1] {
                    let n = s.step(dx);
                    if rule.stops(n) {
                        moved[(2 * x0 as i64 + n.x).rem_euclid(span as i64) as usize] += w;
                    } else {
                        *next.entry(n).or_insert_with(BigUint::zero) += w;
                    }
                }
            }
            alive = next;
            stopped = moved;
        }
        out.push(measure(&stopped, t));
    }
    Ok(out)
}
