use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::shuffle::{Card, Deck, Move, StringAssignment};
use crate::{Error, Result};

/// Conditions on a path, evaluated on every prefix.
///
/// Move predicates apply to random-to-top and the top-to-bottom mixture,
/// riffle predicates to inverse riffle paths. `Always` applies to both.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PredicateKind {
    Always,
    /// At least `k` different labels have been moved to the top.
    KDistinctChosen(usize),
    AllChosen,
    CardChosen(Card),
    AnyOfChosen(Vec<Card>),
    /// The card has been chosen, and unless every card has been chosen,
    /// at least `k` other chosen cards were last chosen before it.
    ChosenMoreRecentlyThan(Card, usize),
    AnyToTopMove,
    /// Each of the `j` smallest strings differs from every other string.
    RiffleFirstJStringsDistinct(usize),
    RiffleSetStringsDistinct(Vec<Card>),
    RiffleAllStringsDistinct,
    /// Cutting the sorted strings into blocks of `b`, no string is shared across a block boundary.
    RiffleBlocksNonOverlapping(usize),
}

/// A path prefix as seen by a predicate.
#[derive(Clone, Copy, Debug)]
pub enum PathPrefix<'a> {
    Moves {
        start: &'a Deck,
        moves: &'a [Move],
        /// `decks[i]` is the deck after `i + 1` moves.
        decks: &'a [Deck],
    },
    Riffle {
        start: &'a Deck,
        /// Strings restricted to the steps taken so far.
        assignment: &'a StringAssignment,
        deck: &'a Deck,
    },
}

impl PathPrefix<'_> {
    pub fn start(&self) -> &Deck {
        match self {
            PathPrefix::Moves { start, .. } | PathPrefix::Riffle { start, .. } => start,
        }
    }
}

fn chosen(moves: &[Move], card: Card) -> bool {
    moves.contains(&Move::ToTop(card))
}

fn last_choice(moves: &[Move], card: Card) -> Option<usize> {
    moves.iter().rposition(|m| *m == Move::ToTop(card))
}

fn distinct_chosen(moves: &[Move], n: usize) -> usize {
    let mut seen = vec![false; n + 1];
    for m in moves {
        if let Move::ToTop(c) = m {
            seen[*c as usize] = true;
        }
    }
    seen.iter().filter(|&&b| b).count()
}

impl PredicateKind {
    pub fn is_riffle(&self) -> bool {
        matches!(
            self,
            PredicateKind::RiffleFirstJStringsDistinct(_)
                | PredicateKind::RiffleSetStringsDistinct(_)
                | PredicateKind::RiffleAllStringsDistinct
                | PredicateKind::RiffleBlocksNonOverlapping(_)
        )
    }

    /// Checks parameters against deck size `n` and the chain kind.
    pub fn validate(&self, n: usize, riffle_chain: bool) -> Result<()> {
        if *self != PredicateKind::Always && self.is_riffle() != riffle_chain {
            return Err(Error::param(format!(
                "predicate {self} does not apply to {} chains",
                if riffle_chain { "riffle" } else { "move" }
            )));
        }
        let card_ok = |c: &Card| *c >= 1 && (*c as usize) <= n;
        let ok = match self {
            PredicateKind::Always
            | PredicateKind::AllChosen
            | PredicateKind::AnyToTopMove
            | PredicateKind::RiffleAllStringsDistinct => true,
            PredicateKind::KDistinctChosen(k) => (1..=n).contains(k),
            PredicateKind::CardChosen(c) => card_ok(c),
            PredicateKind::ChosenMoreRecentlyThan(c, k) => card_ok(c) && *k < n,
            PredicateKind::AnyOfChosen(s) | PredicateKind::RiffleSetStringsDistinct(s) => {
                !s.is_empty() && s.iter().all(card_ok)
            }
            PredicateKind::RiffleFirstJStringsDistinct(j) => (1..=n).contains(j),
            PredicateKind::RiffleBlocksNonOverlapping(b) => *b >= 1 && n.is_multiple_of(*b),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!("predicate {self} invalid for n = {n}")))
        }
    }

    /// Evaluates the predicate on a prefix of a path on `n` cards.
    pub fn holds(&self, n: usize, prefix: &PathPrefix<'_>) -> Result<bool> {
        match prefix {
            PathPrefix::Moves { moves, .. } => self.holds_on_moves(n, moves),
            PathPrefix::Riffle { assignment, .. } => self.holds_on_strings(assignment),
        }
    }

    pub(crate) fn holds_on_moves(&self, n: usize, moves: &[Move]) -> Result<bool> {
        Ok(match self {
            PredicateKind::Always => true,
            PredicateKind::KDistinctChosen(k) => distinct_chosen(moves, n) >= *k,
            PredicateKind::AllChosen => distinct_chosen(moves, n) == n,
            PredicateKind::CardChosen(c) => chosen(moves, *c),
            PredicateKind::AnyOfChosen(s) => s.iter().any(|c| chosen(moves, *c)),
            PredicateKind::ChosenMoreRecentlyThan(c, k) => match last_choice(moves, *c) {
                None => false,
                Some(at) => {
                    distinct_chosen(moves, n) == n
                        || (1..=n as Card)
                            .filter(|d| d != c)
                            .filter(|d| last_choice(moves, *d).is_some_and(|l| l < at))
                            .count()
                            >= *k
                }
            },
            PredicateKind::AnyToTopMove => moves.iter().any(|m| matches!(m, Move::ToTop(_))),
            _ => return Err(Error::param(format!("predicate {self} needs a riffle path"))),
        })
    }

    pub(crate) fn holds_on_strings(&self, a: &StringAssignment) -> Result<bool> {
        let unique_at = |sorted: &[u32], i: usize| {
            (i == 0 || sorted[i - 1] != sorted[i])
                && (i + 1 == sorted.len() || sorted[i + 1] != sorted[i])
        };
        Ok(match self {
            PredicateKind::Always => true,
            PredicateKind::RiffleAllStringsDistinct => a.all_distinct(),
            PredicateKind::RiffleFirstJStringsDistinct(j) => {
                let sorted = a.sorted_keys();
                (0..*j).all(|i| unique_at(&sorted, i))
            }
            PredicateKind::RiffleSetStringsDistinct(s) => {
                let mut keys: Vec<u32> = s.iter().map(|&c| a.key_of(c)).collect();
                keys.sort_unstable();
                keys.windows(2).all(|w| w[0] != w[1])
            }
            PredicateKind::RiffleBlocksNonOverlapping(b) => {
                let sorted = a.sorted_keys();
                (1..sorted.len() / b).all(|blk| sorted[blk * b - 1] < sorted[blk * b])
            }
            _ => return Err(Error::param(format!("predicate {self} needs a move path"))),
        })
    }
}

fn cards(s: &str) -> Result<Vec<Card>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad card label {x:?}")))
        })
        .collect()
}

fn int(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

impl FromStr for PredicateKind {
    type Err = Error;

    /// Parses names such as `k_distinct:2`, `card_chosen:1`,
    /// `chosen_more_recently_than:1:1` or `first_strings_distinct:1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().splitn(2, ':');
        let name = parts.next().unwrap_or_default();
        let arg = parts.next();
        let need = || arg.ok_or_else(|| Error::Parse(format!("predicate {name} needs an argument")));
        let kind = match name {
            "always" => PredicateKind::Always,
            "all_chosen" => PredicateKind::AllChosen,
            "any_to_top" => PredicateKind::AnyToTopMove,
            "all_strings_distinct" => PredicateKind::RiffleAllStringsDistinct,
            "k_distinct" => PredicateKind::KDistinctChosen(int(need()?)?),
            "card_chosen" => match cards(need()?)?.as_slice() {
                [c] => PredicateKind::CardChosen(*c),
                _ => return Err(Error::Parse("card_chosen takes one card".into())),
            },
            "any_of_chosen" => PredicateKind::AnyOfChosen(cards(need()?)?),
            "chosen_more_recently_than" => {
                let (c, k) = need()?
                    .split_once(':')
                    .ok_or_else(|| Error::Parse("expected chosen_more_recently_than:CARD:K".into()))?;
                match cards(c)?.as_slice() {
                    [c] => PredicateKind::ChosenMoreRecentlyThan(*c, int(k)?),
                    _ => return Err(Error::Parse("expected one card".into())),
                }
            }
            "first_strings_distinct" => PredicateKind::RiffleFirstJStringsDistinct(int(need()?)?),
            "set_strings_distinct" => PredicateKind::RiffleSetStringsDistinct(cards(need()?)?),
            "blocks_non_overlapping" => PredicateKind::RiffleBlocksNonOverlapping(int(need()?)?),
            other => return Err(Error::Parse(format!("unknown predicate {other:?}"))),
        };
        let bare = matches!(
            kind,
            PredicateKind::Always
                | PredicateKind::AllChosen
                | PredicateKind::AnyToTopMove
                | PredicateKind::RiffleAllStringsDistinct
        );
        if bare && arg.is_some() {
            return Err(Error::Parse(format!("predicate {name} takes no argument")));
        }
        Ok(kind)
    }
}

fn join(v: &[Card]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for PredicateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateKind::Always => f.write_str("always"),
            PredicateKind::AllChosen => f.write_str("all_chosen"),
            PredicateKind::AnyToTopMove => f.write_str("any_to_top"),
            PredicateKind::RiffleAllStringsDistinct => f.write_str("all_strings_distinct"),
            PredicateKind::KDistinctChosen(k) => write!(f, "k_distinct:{k}"),
            PredicateKind::CardChosen(c) => write!(f, "card_chosen:{c}"),
            PredicateKind::AnyOfChosen(s) => write!(f, "any_of_chosen:{}", join(s)),
            PredicateKind::ChosenMoreRecentlyThan(c, k) => {
                write!(f, "chosen_more_recently_than:{c}:{k}")
            }
            PredicateKind::RiffleFirstJStringsDistinct(j) => write!(f, "first_strings_distinct:{j}"),
            PredicateKind::RiffleSetStringsDistinct(s) => write!(f, "set_strings_distinct:{}", join(s)),
            PredicateKind::RiffleBlocksNonOverlapping(b) => write!(f, "blocks_non_overlapping:{b}"),
        }
    }
}

impl Serialize for PredicateKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recency_is_not_monotone() {
        let p = PredicateKind::ChosenMoreRecentlyThan(1, 1);
        let seq = [Move::ToTop(2), Move::ToTop(1), Move::ToTop(2)];
        let vals: Vec<bool> = (0..=3)
            .map(|s| p.holds_on_moves(3, &seq[..s]).unwrap())
            .collect();
        assert_eq!(vals, vec![false, false, true, false]);
        // every card chosen: holds regardless of order
        let all = [Move::ToTop(1), Move::ToTop(2), Move::ToTop(3)];
        assert!(p.holds_on_moves(3, &all).unwrap());
    }

    #[test]
    fn string_predicates() {
        // sorted keys 0,0,1,2,3,3
        let a = StringAssignment::new(2, vec![0, 1, 0, 2, 3, 3]).unwrap();
        assert!(!PredicateKind::RiffleFirstJStringsDistinct(1).holds_on_strings(&a).unwrap());
        let b = StringAssignment::new(2, vec![1, 0, 2, 2]).unwrap();
        assert!(PredicateKind::RiffleFirstJStringsDistinct(2).holds_on_strings(&b).unwrap());
        assert!(!PredicateKind::RiffleFirstJStringsDistinct(3).holds_on_strings(&b).unwrap());
        assert!(PredicateKind::RiffleSetStringsDistinct(vec![1, 2, 3]).holds_on_strings(&b).unwrap());
        assert!(!PredicateKind::RiffleAllStringsDistinct.holds_on_strings(&b).unwrap());
        // sorted 0,1,2,2: blocks of two are {0,1},{2,2}
        assert!(PredicateKind::RiffleBlocksNonOverlapping(2).holds_on_strings(&b).unwrap());
        let c = StringAssignment::new(2, vec![1, 1, 2, 0]).unwrap();
        assert!(!PredicateKind::RiffleBlocksNonOverlapping(2).holds_on_strings(&c).unwrap());
    }

    #[test]
    fn chain_mismatch_is_rejected() {
        assert!(PredicateKind::AllChosen.validate(4, true).is_err());
        assert!(PredicateKind::RiffleAllStringsDistinct.validate(4, false).is_err());
        assert!(PredicateKind::Always.validate(4, true).is_ok());
        assert!(PredicateKind::KDistinctChosen(5).validate(4, false).is_err());
        assert!(PredicateKind::RiffleBlocksNonOverlapping(3).validate(4, true).is_err());
    }

    #[test]
    fn names_round_trip() {
        for s in [
            "always",
            "all_chosen",
            "any_to_top",
            "all_strings_distinct",
            "k_distinct:2",
            "card_chosen:1",
            "any_of_chosen:1,2",
            "chosen_more_recently_than:1:2",
            "first_strings_distinct:1",
            "set_strings_distinct:1,2",
            "blocks_non_overlapping:2",
        ] {
            assert_eq!(s.parse::<PredicateKind>().unwrap().to_string(), s);
        }
        assert!("always:1".parse::<PredicateKind>().is_err());
        assert!("k_distinct".parse::<PredicateKind>().is_err());
    }
}
