use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dist::Distribution;
use crate::rational::{ratio, ratio_big, Rational};
use crate::{Error, Result};

/// Probability that `t` uniform draws from `n` labels show at least `k` distinct labels.
pub fn prob_k_distinct(n: usize, k: usize, t: usize) -> Result<Rational> {
    if !(1..=n).contains(&k) {
        return Err(Error::param(format!("k = {k} outside 1..={n}")));
    }
    let mut p = vec![Rational::zero(); n + 1];
    p[0] = Rational::one();
    for _ in 0..t {
        let mut next = vec![Rational::zero(); n + 1];
        for (j, pj) in p.iter().enumerate() {
            if pj.is_zero() {
                continue;
            }
            next[j] += pj * ratio(j as i64, n as i64);
            if j < n {
                next[j + 1] += pj * ratio((n - j) as i64, n as i64);
            }
        }
        p = next;
    }
    Ok(p[k..].iter().sum())
}

/// Probability that `n` uniform `t`-bit strings are pairwise distinct.
pub fn prob_strings_distinct(n: usize, t: usize) -> Rational {
    let space = BigUint::one() << t;
    (0..n)
        .map(|i| {
            let i = BigUint::from(i);
            if i >= space {
                Rational::zero()
            } else {
                ratio_big(&space - i, space.clone())
            }
        })
        .product()
}

/// Number of `+-1` sequences of length `t` whose partial sums stay nonnegative.
pub fn count_nonnegative_paths(t: usize) -> BigUint {
    let mut counts = vec![BigUint::zero(); t + 2];
    counts[0] = BigUint::one();
    for _ in 0..t {
        let mut next = vec![BigUint::zero(); t + 2];
        for h in 0..=t {
            if counts[h].is_zero() {
                continue;
            }
            next[h + 1] += &counts[h];
            if h > 0 {
                next[h - 1] += &counts[h];
            }
        }
        counts = next;
    }
    counts.into_iter().sum()
}

/// Exact law of one card's position (1 = top) after `t` steps of the top-to-bottom mixture.
pub fn walk1_position_distribution(n: usize, t: usize, p0: usize) -> Result<Distribution<usize>> {
    if n < 2 {
        return Err(Error::param("deck needs at least 2 cards"));
    }
    if !(1..=n).contains(&p0) {
        return Err(Error::param(format!("start position {p0} outside 1..={n}")));
    }
    let unit = ratio(1, 2 * n as i64);
    let half = ratio(1, 2);
    let mut law = vec![Rational::zero(); n + 1];
    law[p0] = Rational::one();
    for _ in 0..t {
        let mut next = vec![Rational::zero(); n + 1];
        for p in 1..=n {
            let w = &law[p];
            if w.is_zero() {
                continue;
            }
            next[1] += w * &unit;
            if p < n {
                next[p + 1] += w * &unit * from_usize(n - p);
            }
            next[p] += w * &unit * from_usize(p - 1);
            next[if p == 1 { n } else { p - 1 }] += w * &half;
        }
        law = next;
    }
    Distribution::new(law.into_iter().enumerate().skip(1))
}

fn from_usize(x: usize) -> Rational {
    Rational::from_integer(x.into())
}

/// The failed strong stationary time argument for the top-to-bottom mixture.
///
/// Tracks the bottom card `n` for `t` steps and compares the chance that
/// it is on top with the uniform share `1/n`. The reflection count gives
/// an upper bound `(2^t - paths) / (n 2^t)` on that chance; it is exact
/// only for `t <= 2`.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub t: usize,
    /// Exact probability that card `n`, started at the bottom, is on top at time `t`.
    #[serde(with = "crate::rational::serde_str")]
    pub prob_top_is_bottom_card: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub reflection_bound: Rational,
    /// `reflection_bound` written as `(2^t - paths) / (n 2^t)` without reducing.
    pub reflection_bound_unreduced: String,
    pub reflection_bound_holds: bool,
    pub reflection_bound_is_exact: bool,
    #[serde(with = "crate::rational::serde_str")]
    pub uniform_share: Rational,
    /// Number of `+-1` walks of length `t` that never go below zero.
    pub nonnegative_paths: String,
    pub total_paths: String,
    /// `1 - n P(top = n)`: the deck's separation distance is at least this.
    #[serde(with = "crate::rational::serde_str")]
    pub separation_lower_bound: Rational,
    /// `paths / 2^t`, the lower bound implied by the reflection bound.
    #[serde(with = "crate::rational::serde_str")]
    pub reflection_lower_bound: Rational,
    pub reflection_lower_bound_unreduced: String,
    /// The bound `1/2^t` that the faulty argument would give.
    #[serde(with = "crate::rational::serde_str")]
    pub claimed_bound: Rational,
    pub claim_refuted: bool,
}

/// Builds the counterexample report for a deck of `n` cards after `t` steps.
pub fn counterexample(n: usize, t: usize) -> Result<CounterexampleReport> {
    let law = walk1_position_distribution(n, t, n)?;
    let p = law.weight(&1);
    let paths = count_nonnegative_paths(t);
    let total = BigUint::one() << t;
    let bound = ratio_big(&total - &paths, &total * BigUint::from(n));
    let lower = Rational::one() - &p * from_usize(n);
    let claimed = ratio_big(BigUint::one(), total.clone());
    Ok(CounterexampleReport {
        n,
        t,
        reflection_bound_unreduced: format!("{}/{}", &total - &paths, &total * BigUint::from(n)),
        reflection_bound_holds: p <= bound,
        reflection_bound_is_exact: p == bound,
        reflection_bound: bound,
        uniform_share: ratio(1, n as i64),
        reflection_lower_bound: ratio_big(paths.clone(), total.clone()),
        reflection_lower_bound_unreduced: format!("{paths}/{total}"),
        nonnegative_paths: paths.to_string(),
        total_paths: total.to_string(),
        claim_refuted: lower > claimed,
        prob_top_is_bottom_card: p,
        separation_lower_bound: lower,
        claimed_bound: claimed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_distinct_values() {
        assert_eq!(prob_k_distinct(5, 1, 4).unwrap(), Rational::one());
        assert_eq!(prob_k_distinct(5, 2, 3).unwrap(), ratio(24, 25));
        assert_eq!(prob_k_distinct(3, 3, 3).unwrap(), ratio(6, 27));
        assert!(prob_k_distinct(3, 0, 3).is_err());
        assert!(prob_k_distinct(3, 1, 0).unwrap().is_zero());
    }

    #[test]
    fn birthday_values() {
        assert_eq!(prob_strings_distinct(1, 0), Rational::one());
        assert_eq!(prob_strings_distinct(2, 1), ratio(1, 2));
        assert_eq!(prob_strings_distinct(3, 2), ratio(3, 8));
        assert!(prob_strings_distinct(5, 2).is_zero());
    }

    #[test]
    fn ballot_counts() {
        assert_eq!(count_nonnegative_paths(0), BigUint::one());
        assert_eq!(count_nonnegative_paths(4), BigUint::from(6u8));
        assert_eq!(count_nonnegative_paths(10), BigUint::from(252u16));
    }

    #[test]
    fn single_card_chain() {
        let d = walk1_position_distribution(3, 1, 3).unwrap();
        assert_eq!(d.weights(), &[ratio(1, 6), ratio(1, 2), ratio(1, 3)]);
        assert!(walk1_position_distribution(3, 1, 4).is_err());
    }

    #[test]
    fn deck_of_52() {
        let r = counterexample(52, 10).unwrap();
        assert_eq!(r.reflection_bound_unreduced, "772/53248");
        assert_eq!(r.reflection_lower_bound_unreduced, "252/1024");
        assert!(r.reflection_bound_holds);
        assert!(!r.reflection_bound_is_exact);
        assert!(r.prob_top_is_bottom_card < ratio(772, 53248));
        assert!(r.separation_lower_bound >= ratio(252, 1024));
        assert!(r.claim_refuted);
    }

    #[test]
    fn reflection_bound_exact_for_two_steps() {
        let r = counterexample(5, 2).unwrap();
        assert!(r.reflection_bound_is_exact);
        assert_eq!(r.prob_top_is_bottom_card, ratio(1, 10));
        let r = counterexample(5, 3).unwrap();
        assert_eq!(r.prob_top_is_bottom_card, ratio(3, 25));
        assert_eq!(r.reflection_bound, ratio(1, 8));
    }
}
