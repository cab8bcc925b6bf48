use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::family::ChainFamily;
use super::path::{check_inputs, fold_paths, Path, PathRef, PathSteps};
use super::predicate::{PathPrefix, PredicateKind};
use crate::dist::{separation_distance, Distribution, Mode};
use crate::rational::{ratio_big, Rational};
use crate::shuffle::{inverse_riffle_apply, stationary_statistic_distribution, Deck, StatValue, StatisticKind};
use crate::{Error, Exec, Result, DEFAULT_BUDGET};

/// Evaluates the predicate on every prefix `s = 0..=t` of a path.
///
/// Riffle prefixes use the strings truncated to their first `s` bits.
pub(crate) fn prefix_values(
    predicate: &PredicateKind,
    n: usize,
    start: &Deck,
    path: &PathRef<'_>,
) -> Result<Vec<bool>> {
    match path {
        PathRef::Moves { moves, decks, .. } => (0..=moves.len())
            .map(|s| {
                predicate.holds(
                    n,
                    &PathPrefix::Moves {
                        start,
                        moves: &moves[..s],
                        decks: &decks[..s],
                    },
                )
            })
            .collect(),
        PathRef::Riffle { assignment, .. } => (0..=assignment.bits())
            .map(|s| {
                let truncated = assignment.truncated(s);
                let deck = inverse_riffle_apply(start, &truncated)?;
                predicate.holds(
                    n,
                    &PathPrefix::Riffle {
                        start,
                        assignment: &truncated,
                        deck: &deck,
                    },
                )
            })
            .collect(),
    }
}

/// True when the sequence never goes from `true` back to `false`.
pub(crate) fn is_monotone(values: &[bool]) -> bool {
    values.windows(2).all(|w| !w[0] || w[1])
}

/// Law of the statistic at time `t` given the predicate, with the predicate's probability `q`.
///
/// `paths` must be the complete list of length-`t` paths of one chain.
/// The returned distribution covers every value the statistic takes on
/// any path, with zero weight on values no satisfying path reaches.
pub fn conditional_statistic_distribution(
    paths: &[Path],
    predicate: &PredicateKind,
    statistic: &StatisticKind,
    t: usize,
) -> Result<(Rational, Distribution<StatValue>)> {
    let Some(first) = paths.first() else {
        return Err(Error::param("no paths given"));
    };
    let n = first.start.len();
    statistic.validate(n)?;
    predicate.validate(n, matches!(first.steps, PathSteps::Riffle(_)))?;
    if paths.iter().any(|p| p.len() != t) {
        return Err(Error::param(format!("paths must all have length {t}")));
    }
    if !paths.iter().map(|p| &p.weight).sum::<Rational>().is_one() {
        return Err(Error::param("path weights do not sum to 1; the list is not exhaustive"));
    }

    let mut q = Rational::zero();
    let mut mass: BTreeMap<StatValue, Rational> = BTreeMap::new();
    for p in paths {
        let value = statistic.evaluate(&p.end)?;
        let holds = match &p.steps {
            PathSteps::Moves(moves) => {
                let mut decks = Vec::with_capacity(moves.len());
                for mv in moves {
                    decks.push(decks.last().unwrap_or(&p.start).apply(*mv)?);
                }
                predicate.holds(n, &PathPrefix::Moves { start: &p.start, moves, decks: &decks })?
            }
            PathSteps::Riffle(a) => predicate.holds(
                n,
                &PathPrefix::Riffle { start: &p.start, assignment: a, deck: &p.end },
            )?,
        };
        let entry = mass.entry(value).or_insert_with(Rational::zero);
        if holds {
            *entry += &p.weight;
            q += &p.weight;
        }
    }
    if q.is_zero() {
        return Err(Error::PredicateNeverSatisfied);
    }
    let dist = Distribution::new(mass.into_iter().map(|(v, w)| (v, w / &q)))?;
    Ok((q, dist))
}

/// Settings for [`check_strong_stationarity`].
#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Starting deck; the identity when `None`.
    pub start: Option<Deck>,
    pub budget: u64,
    pub exec: Exec,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            start: None,
            budget: DEFAULT_BUDGET,
            exec: Exec::default(),
        }
    }
}

/// Outcome of an exact strong stationarity check.
#[derive(Clone, Debug, Serialize)]
pub struct SstReport {
    pub chain: ChainFamily,
    pub n: usize,
    pub t: usize,
    pub start: Deck,
    pub predicate: PredicateKind,
    pub statistic: StatisticKind,
    /// Number of weighted branches enumerated.
    pub paths: u64,
    #[serde(with = "crate::rational::serde_str")]
    pub q: Rational,
    pub conditional: Distribution<StatValue>,
    pub target: Distribution<StatValue>,
    pub unconditional: Distribution<StatValue>,
    /// Exact separation of the unconditional law from the target.
    #[serde(with = "crate::rational::serde_str")]
    pub separation: Rational,
    pub is_strongly_stationary: bool,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub sep_bound: Option<Rational>,
    #[serde(with = "crate::rational::serde_str")]
    pub max_pointwise_deviation: Rational,
    pub predicate_stable: bool,
    /// Total weight of paths along which the predicate turns false after holding.
    #[serde(with = "crate::rational::serde_str")]
    pub unstable_weight: Rational,
    pub mode: Mode,
}

/// The conditional law restricted to a subset of statistic values.
#[derive(Clone, Debug, Serialize)]
pub struct Restriction {
    pub values: Vec<StatValue>,
    pub conditional: Distribution<StatValue>,
    pub target: Distribution<StatValue>,
    pub is_uniform: bool,
    pub matches_target: bool,
}

impl SstReport {
    /// Renormalizes the conditional and target laws onto the values kept by `keep`.
    pub fn restricted(&self, keep: impl Fn(&StatValue) -> bool) -> Result<Restriction> {
        let conditional = self.conditional.restrict(&keep)?;
        let target = self.target.restrict(&keep)?;
        let is_uniform = conditional.weights().windows(2).all(|w| w[0] == w[1]);
        Ok(Restriction {
            values: conditional.support().to_vec(),
            matches_target: conditional.same_law(&target),
            conditional,
            target,
            is_uniform,
        })
    }

    /// Checks `q * conditional(a) <= unconditional(a)` for every value `a`.
    pub fn premise_holds(&self) -> bool {
        self.conditional
            .iter()
            .all(|(a, w)| &self.q * w <= self.unconditional.weight(a))
    }
}

#[derive(Default)]
struct Tally {
    satisfied: u128,
    unstable: u128,
    conditional: BTreeMap<StatValue, u128>,
    unconditional: BTreeMap<StatValue, u128>,
    error: Option<Error>,
}

impl Tally {
    fn absorb(&mut self, other: Tally) {
        self.satisfied += other.satisfied;
        self.unstable += other.unstable;
        for (v, w) in other.conditional {
            *self.conditional.entry(v).or_default() += w;
        }
        for (v, w) in other.unconditional {
            *self.unconditional.entry(v).or_default() += w;
        }
        self.error = self.error.take().or(other.error);
    }
}

fn over(counts: &BTreeMap<StatValue, u128>, support: &[StatValue], den: &BigUint) -> Result<Distribution<StatValue>> {
    Distribution::new(support.iter().map(|v| {
        let c = counts.get(v).copied().unwrap_or(0);
        (v.clone(), ratio_big(c.into(), den.clone()))
    }))
}

/// Certifies or refutes a candidate strong stationary time by exhaustive enumeration.
///
/// The predicate is a certificate exactly when, given that it holds at
/// time `t`, the statistic's law equals its law under the uniform deck.
/// Then separation at `t` is at most `1 - q`. Needs `n <= 8` for the target.
pub fn check_strong_stationarity(
    family: ChainFamily,
    n: usize,
    t: usize,
    predicate: &PredicateKind,
    statistic: &StatisticKind,
    options: &CheckOptions,
) -> Result<SstReport> {
    let start = match &options.start {
        Some(d) => d.clone(),
        None => Deck::identity(n)?,
    };
    statistic.validate(n)?;
    predicate.validate(n, family.is_riffle())?;
    let den = check_inputs(family, n, t, &start, options.budget)?;
    let target = stationary_statistic_distribution(n, statistic, options.exec)?;

    let parts = fold_paths(family, n, t, &start, options.exec, Tally::default, |acc: &mut Tally, path| {
        if acc.error.is_some() {
            return;
        }
        let w = path.numerator();
        let value = statistic.evaluate_unchecked(path.end(&start));
        match prefix_values(predicate, n, &start, path) {
            Ok(values) => {
                if !is_monotone(&values) {
                    acc.unstable += w;
                }
                if values[t] {
                    acc.satisfied += w;
                    *acc.conditional.entry(value.clone()).or_default() += w;
                }
                *acc.unconditional.entry(value).or_default() += w;
            }
            Err(e) => acc.error = Some(e),
        }
    });
    let mut tally = Tally::default();
    for part in parts {
        tally.absorb(part);
    }
    if let Some(e) = tally.error {
        return Err(e);
    }
    if tally.satisfied == 0 {
        return Err(Error::PredicateNeverSatisfied);
    }

    let den_big = BigUint::from(den);
    let support = target.support().to_vec();
    let conditional = over(&tally.conditional, &support, &BigUint::from(tally.satisfied))?;
    let unconditional = over(&tally.unconditional, &support, &den_big)?;
    let q = ratio_big(tally.satisfied.into(), den_big.clone());
    let is_ss = conditional.same_law(&target);
    let deviation = conditional.max_pointwise_deviation(&target);
    let separation = separation_distance(&unconditional, &target)?;
    Ok(SstReport {
        chain: family,
        n,
        t,
        start,
        predicate: predicate.clone(),
        statistic: statistic.clone(),
        paths: family.branch_count(n, t).unwrap_or_default() as u64,
        sep_bound: is_ss.then(|| Rational::one() - &q),
        q,
        conditional,
        target,
        unconditional,
        separation,
        is_strongly_stationary: is_ss,
        max_pointwise_deviation: deviation,
        predicate_stable: tally.unstable == 0,
        unstable_weight: ratio_big(tally.unstable.into(), den_big),
        mode: Mode::Exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::sst::enumerate_paths;

    fn opts() -> CheckOptions {
        CheckOptions::default()
    }

    #[test]
    fn top_two_order_small() {
        let id = Deck::identity(3).unwrap();
        let paths = enumerate_paths(ChainFamily::RandomToTop, 3, 2, &id, 100).unwrap();
        let (q, d) = conditional_statistic_distribution(
            &paths,
            &PredicateKind::KDistinctChosen(2),
            &StatisticKind::TopKOrder(2),
            2,
        )
        .unwrap();
        assert_eq!(q, ratio(2, 3));
        assert_eq!(d.len(), 6);
        assert!(d.weights().iter().all(|w| *w == ratio(1, 6)));
    }

    #[test]
    fn top_two_certificate() {
        let r = check_strong_stationarity(
            ChainFamily::RandomToTop,
            4,
            3,
            &PredicateKind::KDistinctChosen(2),
            &StatisticKind::TopKOrder(2),
            &opts(),
        )
        .unwrap();
        assert!(r.is_strongly_stationary);
        assert_eq!(r.sep_bound, Some(ratio(1, 16)));
        assert!(r.predicate_stable);
        assert!(r.max_pointwise_deviation.is_zero());
        assert!(r.premise_holds());
        assert!(r.separation <= ratio(1, 16));
    }

    #[test]
    fn cautionary_walk_is_refuted() {
        let r = check_strong_stationarity(
            ChainFamily::Walk1,
            3,
            2,
            &PredicateKind::AnyToTopMove,
            &StatisticKind::TopCard,
            &opts(),
        )
        .unwrap();
        assert_eq!(r.q, ratio(3, 4));
        assert!(!r.is_strongly_stationary);
        assert!(r.predicate_stable);
        assert_eq!(r.sep_bound, None);
        assert_eq!(r.conditional.weights(), &[ratio(4, 9), ratio(1, 3), ratio(2, 9)]);
        assert_eq!(r.max_pointwise_deviation, ratio(1, 9));
    }

    #[test]
    fn card_above_restricts_to_uniform() {
        let r = check_strong_stationarity(
            ChainFamily::RandomToTop,
            4,
            3,
            &PredicateKind::CardChosen(1),
            &StatisticKind::CardAbove(1),
            &opts(),
        )
        .unwrap();
        assert!(!r.is_strongly_stationary);
        let restricted = r
            .restricted(|v| matches!(v, StatValue::Neighbor(Some(c)) if (2..=4).contains(c)))
            .unwrap();
        assert_eq!(restricted.values.len(), 3);
        assert!(restricted.is_uniform);
    }

    #[test]
    fn never_satisfied_is_an_error() {
        let err = check_strong_stationarity(
            ChainFamily::RandomToTop,
            4,
            1,
            &PredicateKind::KDistinctChosen(2),
            &StatisticKind::TopCard,
            &opts(),
        )
        .unwrap_err();
        assert_eq!(err, Error::PredicateNeverSatisfied);
    }

    #[test]
    fn recency_predicate_is_unstable() {
        let r = check_strong_stationarity(
            ChainFamily::RandomToTop,
            3,
            3,
            &PredicateKind::ChosenMoreRecentlyThan(1, 1),
            &StatisticKind::TopCard,
            &opts(),
        )
        .unwrap();
        assert!(!r.predicate_stable);
        assert!(r.unstable_weight > Rational::zero());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let run = |exec| {
            let o = CheckOptions { exec, ..opts() };
            let r = check_strong_stationarity(
                ChainFamily::Walk1,
                4,
                4,
                &PredicateKind::KDistinctChosen(2),
                &StatisticKind::TopKOrder(2),
                &o,
            )
            .unwrap();
            serde_json::to_string(&r).unwrap()
        };
        assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
    }
}
