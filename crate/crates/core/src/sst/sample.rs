use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::check::{is_monotone, prefix_values};
use super::family::ChainFamily;
use super::path::PathRef;
use super::predicate::PredicateKind;
use crate::shuffle::{
    inverse_riffle_apply, stationary_statistic_distribution, Card, Deck, Move, StatValue, StatisticKind,
    StringAssignment, MAX_DENSE_N, MAX_STRING_BITS,
};
use crate::{rational, Error, Exec, Result};

const CHUNK: u64 = 4096;
const Z95: f64 = 1.959_963_984_540_054;

/// Settings for [`sample_strong_stationarity`].
#[derive(Clone, Debug)]
pub struct SampleOptions {
    pub samples: u64,
    pub seed: u64,
    pub start: Option<Deck>,
    pub exec: Exec,
}

/// A proportion estimate with its 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub low: f64,
    pub high: f64,
}

impl Estimate {
    fn wilson(hits: u64, trials: u64) -> Self {
        Self::wilson_z(hits, trials, Z95)
    }

    fn wilson_z(hits: u64, trials: u64, z: f64) -> Self {
        if trials == 0 {
            return Self { value: f64::NAN, low: 0.0, high: 1.0 };
        }
        let n = trials as f64;
        let p = hits as f64 / n;
        let z2 = z * z;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
        Self {
            value: p,
            low: (centre - half).max(0.0),
            high: (centre + half).min(1.0),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

/// One statistic value in a sampled conditional law.
#[derive(Clone, Debug, Serialize)]
pub struct ValueEstimate {
    pub value: StatValue,
    pub count: u64,
    pub estimate: Estimate,
    /// Stationary probability when the deck is small enough to compute it.
    pub target: Option<f64>,
}

/// Monte-Carlo estimates for a candidate strong stationary time. Never a certificate.
#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub chain: ChainFamily,
    pub n: usize,
    pub t: usize,
    pub predicate: PredicateKind,
    pub statistic: StatisticKind,
    pub samples: u64,
    pub seed: u64,
    pub satisfied: u64,
    pub q: Estimate,
    pub conditional: Vec<ValueEstimate>,
    /// Largest `|estimate - target|` over values, when the target is known.
    pub max_abs_deviation: Option<f64>,
    /// Whether every target probability falls inside its Bonferroni-adjusted
    /// interval, so the check as a whole has 95% coverage.
    pub consistent_with_target: Option<bool>,
    pub unstable_samples: u64,
    pub certified: bool,
}

/// Normal quantile giving 95% simultaneous coverage over `m` intervals.
fn simultaneous_z(m: usize) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let alpha = 0.05 / m.max(1) as f64;
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

#[derive(Default)]
struct Counts {
    satisfied: u64,
    unstable: u64,
    values: BTreeMap<StatValue, u64>,
    error: Option<Error>,
}

fn sample_path(
    family: ChainFamily,
    n: usize,
    t: usize,
    start: &Deck,
    rng: &mut ChaCha8Rng,
    moves: &mut Vec<Move>,
    decks: &mut Vec<Deck>,
) -> Option<(StringAssignment, Deck)> {
    if family.is_riffle() {
        let mask = ((1u64 << t) - 1) as u32;
        let keys = (0..n).map(|_| rng.random::<u32>() & mask).collect();
        let a = StringAssignment::new(t, keys).expect("masked keys fit");
        let deck = inverse_riffle_apply(start, &a).expect("valid deck");
        return Some((a, deck));
    }
    moves.clear();
    decks.clear();
    for _ in 0..t {
        let flip = family == ChainFamily::Walk1 && rng.random::<bool>();
        let mv = if flip {
            Move::TopToBottom
        } else {
            Move::ToTop(rng.random_range(1..=n as Card))
        };
        let next = decks.last().unwrap_or(start).apply(mv).expect("valid move");
        moves.push(mv);
        decks.push(next);
    }
    None
}

/// Estimates `q` and the conditional law by sampling `samples` independent paths.
///
/// Samples are drawn in fixed chunks, each from its own ChaCha stream of
/// `seed`, so the report does not depend on the thread count.
pub fn sample_strong_stationarity(
    family: ChainFamily,
    n: usize,
    t: usize,
    predicate: &PredicateKind,
    statistic: &StatisticKind,
    options: &SampleOptions,
) -> Result<SampleReport> {
    if n < 2 || n > Card::MAX as usize {
        return Err(Error::param(format!("deck size {n} outside 2..={}", Card::MAX)));
    }
    if family.is_riffle() && t > MAX_STRING_BITS {
        return Err(Error::param(format!("t = {t} exceeds {MAX_STRING_BITS}")));
    }
    if options.samples == 0 {
        return Err(Error::param("samples must be positive"));
    }
    let start = match &options.start {
        Some(d) if d.len() == n => d.clone(),
        Some(_) => return Err(Error::param("start deck has the wrong size")),
        None => Deck::identity(n)?,
    };
    statistic.validate(n)?;
    predicate.validate(n, family.is_riffle())?;

    let chunks: Vec<(u64, u64)> = (0..options.samples.div_ceil(CHUNK))
        .map(|i| (i, CHUNK.min(options.samples - i * CHUNK)))
        .collect();
    let parts = options.exec.map(&chunks, |&(stream, len)| {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(stream);
        let mut counts = Counts::default();
        let mut moves = Vec::with_capacity(t);
        let mut decks = Vec::with_capacity(t);
        for _ in 0..len {
            let riffle = sample_path(family, n, t, &start, &mut rng, &mut moves, &mut decks);
            let path = match &riffle {
                Some((assignment, deck)) => PathRef::Riffle { assignment, deck },
                None => PathRef::Moves { moves: &moves, decks: &decks, numerator: 1 },
            };
            match prefix_values(predicate, n, &start, &path) {
                Ok(values) => {
                    counts.unstable += u64::from(!is_monotone(&values));
                    if values[t] {
                        counts.satisfied += 1;
                        let v = statistic.evaluate_unchecked(path.end(&start));
                        *counts.values.entry(v).or_default() += 1;
                    }
                }
                Err(e) => {
                    counts.error = Some(e);
                    break;
                }
            }
        }
        counts
    });

    let mut total = Counts::default();
    for part in parts {
        if let Some(e) = part.error {
            return Err(e);
        }
        total.satisfied += part.satisfied;
        total.unstable += part.unstable;
        for (v, c) in part.values {
            *total.values.entry(v).or_default() += c;
        }
    }

    let target = if n <= MAX_DENSE_N {
        Some(stationary_statistic_distribution(n, statistic, options.exec)?)
    } else {
        None
    };
    let mut values = total.values.clone();
    if let Some(tg) = &target {
        for v in tg.support() {
            values.entry(v.clone()).or_default();
        }
    }
    let conditional: Vec<ValueEstimate> = values
        .into_iter()
        .map(|(value, count)| ValueEstimate {
            target: target.as_ref().map(|tg| rational::to_f64(&tg.weight(&value))),
            estimate: Estimate::wilson(count, total.satisfied),
            value,
            count,
        })
        .collect();
    let known = target.is_some() && total.satisfied > 0;
    Ok(SampleReport {
        chain: family,
        n,
        t,
        predicate: predicate.clone(),
        statistic: statistic.clone(),
        samples: options.samples,
        seed: options.seed,
        satisfied: total.satisfied,
        q: Estimate::wilson(total.satisfied, options.samples),
        max_abs_deviation: known.then(|| {
            conditional
                .iter()
                .map(|e| (e.estimate.value - e.target.unwrap_or(0.0)).abs())
                .fold(0.0, f64::max)
        }),
        consistent_with_target: known.then(|| {
            let z = simultaneous_z(conditional.len());
            conditional.iter().all(|e| {
                Estimate::wilson_z(e.count, total.satisfied, z).contains(e.target.unwrap_or(0.0))
            })
        }),
        conditional,
        unstable_samples: total.unstable,
        certified: false,
    })
}
