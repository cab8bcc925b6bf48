use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::deck::{check_dense, factorial, Card, Deck, Parity};
use crate::dist::{Distribution, Statistic};
use crate::rational::Rational;
use crate::{Error, Exec, Result};

/// Statistics of a deck.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StatisticKind {
    TopCard,
    TopKOrder(usize),
    TopKSet(usize),
    PositionOf(Card),
    PositionsOf(Vec<Card>),
    Parity,
    CardAbove(Card),
    CardBelow(Card),
    RelativeOrder(Vec<Card>),
    Distance(Card, Card),
    BlockSets(usize),
    ModularHands(usize),
}

/// Value of a deck statistic.
///
/// Serialized through its `Display` form, e.g. `3`, `none`, `even`,
/// `(2,1)`, `{1,4}` or `{1,3}|{2,4}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatValue {
    Card(Card),
    Position(usize),
    Count(usize),
    Neighbor(Option<Card>),
    Parity(Parity),
    Tuple(Vec<usize>),
    Set(Vec<usize>),
    Sets(Vec<Vec<usize>>),
}

fn join(v: &[usize]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for StatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatValue::Card(c) => write!(f, "{c}"),
            StatValue::Position(p) | StatValue::Count(p) => write!(f, "{p}"),
            StatValue::Neighbor(Some(c)) => write!(f, "{c}"),
            StatValue::Neighbor(None) => f.write_str("none"),
            StatValue::Parity(p) => write!(f, "{p}"),
            StatValue::Tuple(v) => write!(f, "({})", join(v)),
            StatValue::Set(v) => write!(f, "{{{}}}", join(v)),
            StatValue::Sets(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| format!("{{{}}}", join(v))).collect();
                f.write_str(&parts.join("|"))
            }
        }
    }
}

impl Serialize for StatValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn check_card(c: Card, n: usize) -> Result<()> {
    if c == 0 || c as usize > n {
        Err(Error::param(format!("card {c} outside 1..={n}")))
    } else {
        Ok(())
    }
}

fn check_set(set: &[Card], n: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::param("empty card set"));
    }
    for &c in set {
        check_card(c, n)?;
    }
    let mut s = set.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param(format!("repeated card in {set:?}")));
    }
    Ok(())
}

impl StatisticKind {
    /// Checks the parameters against deck size `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            StatisticKind::TopCard | StatisticKind::Parity => Ok(()),
            StatisticKind::TopKOrder(k) | StatisticKind::TopKSet(k) => {
                if (1..=n).contains(k) {
                    Ok(())
                } else {
                    Err(Error::param(format!("k = {k} outside 1..={n}")))
                }
            }
            StatisticKind::PositionOf(c)
            | StatisticKind::CardAbove(c)
            | StatisticKind::CardBelow(c) => check_card(*c, n),
            StatisticKind::PositionsOf(s) | StatisticKind::RelativeOrder(s) => check_set(s, n),
            StatisticKind::Distance(a, b) => {
                check_card(*a, n)?;
                check_card(*b, n)?;
                if a == b {
                    Err(Error::param("distance needs two different cards"))
                } else {
                    Ok(())
                }
            }
            StatisticKind::BlockSets(b) => {
                if *b >= 1 && n.is_multiple_of(*b) {
                    Ok(())
                } else {
                    Err(Error::param(format!("block size {b} does not divide {n}")))
                }
            }
            StatisticKind::ModularHands(m) => {
                if *m >= 1 && n.is_multiple_of(*m) {
                    Ok(())
                } else {
                    Err(Error::param(format!("hand count {m} does not divide {n}")))
                }
            }
        }
    }

    /// Evaluates the statistic on `deck`.
    pub fn evaluate(&self, deck: &Deck) -> Result<StatValue> {
        self.validate(deck.len())?;
        Ok(self.evaluate_unchecked(deck))
    }

    pub(crate) fn evaluate_unchecked(&self, deck: &Deck) -> StatValue {
        let cards = deck.cards();
        let pos = |c: Card| deck.position_of(c).expect("validated card");
        match self {
            StatisticKind::TopCard => StatValue::Card(cards[0]),
            StatisticKind::TopKOrder(k) => {
                StatValue::Tuple(cards[..*k].iter().map(|&c| c as usize).collect())
            }
            StatisticKind::TopKSet(k) => {
                let mut v: Vec<usize> = cards[..*k].iter().map(|&c| c as usize).collect();
                v.sort_unstable();
                StatValue::Set(v)
            }
            StatisticKind::PositionOf(c) => StatValue::Position(pos(*c)),
            StatisticKind::PositionsOf(s) => StatValue::Tuple(s.iter().map(|&c| pos(c)).collect()),
            StatisticKind::Parity => StatValue::Parity(deck.parity()),
            StatisticKind::CardAbove(c) => StatValue::Neighbor(deck.card_at(pos(*c) - 1)),
            StatisticKind::CardBelow(c) => StatValue::Neighbor(deck.card_at(pos(*c) + 1)),
            StatisticKind::RelativeOrder(s) => StatValue::Tuple(
                cards
                    .iter()
                    .filter(|c| s.contains(c))
                    .map(|&c| c as usize)
                    .collect(),
            ),
            StatisticKind::Distance(a, b) => StatValue::Count(pos(*a).abs_diff(pos(*b))),
            StatisticKind::BlockSets(b) => StatValue::Sets(
                cards
                    .chunks(*b)
                    .map(|blk| {
                        let mut v: Vec<usize> = blk.iter().map(|&c| c as usize).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect(),
            ),
            StatisticKind::ModularHands(m) => {
                let mut hands = vec![Vec::new(); *m];
                for (i, &c) in cards.iter().enumerate() {
                    hands[i % m].push(c as usize);
                }
                for h in &mut hands {
                    h.sort_unstable();
                }
                StatValue::Sets(hands)
            }
        }
    }

    /// Adapter evaluating the statistic on Lehmer ranks of size-`n` decks.
    pub fn on_ranks(&self, n: usize) -> OnRanks<'_> {
        OnRanks { kind: self, n }
    }
}

/// A [`StatisticKind`] viewed as a statistic of ranked deck states.
#[derive(Clone, Copy, Debug)]
pub struct OnRanks<'a> {
    kind: &'a StatisticKind,
    n: usize,
}

impl Statistic<usize> for OnRanks<'_> {
    type Value = StatValue;

    fn value_of(&self, rank: &usize) -> Option<StatValue> {
        let deck = Deck::unrank(*rank, self.n).ok()?;
        self.kind.evaluate(&deck).ok()
    }
}

impl Statistic<Deck> for StatisticKind {
    type Value = StatValue;

    fn value_of(&self, deck: &Deck) -> Option<StatValue> {
        self.evaluate(deck).ok()
    }
}

/// Law of the statistic under the uniform distribution on all decks of size `n`.
pub fn stationary_statistic_distribution(
    n: usize,
    kind: &StatisticKind,
    exec: Exec,
) -> Result<Distribution<StatValue>> {
    check_dense(n)?;
    kind.validate(n)?;
    let total = factorial(n);
    let partial = exec.map(&Exec::chunks(total, 2048), |range| {
        let mut counts: BTreeMap<StatValue, u64> = BTreeMap::new();
        for r in range.clone() {
            let deck = Deck::unrank(r, n).expect("rank in range");
            *counts.entry(kind.evaluate_unchecked(&deck)).or_default() += 1;
        }
        counts
    });
    let mut counts: BTreeMap<StatValue, u64> = BTreeMap::new();
    for part in partial {
        for (v, c) in part {
            *counts.entry(v).or_default() += c;
        }
    }
    Distribution::new(
        counts
            .into_iter()
            .map(|(v, c)| (v, Rational::new(c.into(), (total as u64).into()))),
    )
}

fn parse_cards(s: &str) -> Result<Vec<Card>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<Card>()
                .map_err(|_| Error::Parse(format!("bad card label {x:?}")))
        })
        .collect()
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

fn one_card(s: &str) -> Result<Card> {
    match parse_cards(s)?.as_slice() {
        [c] => Ok(*c),
        _ => Err(Error::Parse(format!("expected one card, got {s:?}"))),
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    /// Parses `name` or `name:args`, e.g. `top_k_order:2` or `relative_order:1,2`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (s.trim(), None),
        };
        let need = || arg.ok_or_else(|| Error::Parse(format!("statistic {name} needs an argument")));
        let kind = match name {
            "top_card" => StatisticKind::TopCard,
            "parity" => StatisticKind::Parity,
            "top_k_order" => StatisticKind::TopKOrder(parse_usize(need()?)?),
            "top_k_set" => StatisticKind::TopKSet(parse_usize(need()?)?),
            "position_of" => StatisticKind::PositionOf(one_card(need()?)?),
            "positions_of" => StatisticKind::PositionsOf(parse_cards(need()?)?),
            "card_above" => StatisticKind::CardAbove(one_card(need()?)?),
            "card_below" => StatisticKind::CardBelow(one_card(need()?)?),
            "relative_order" => StatisticKind::RelativeOrder(parse_cards(need()?)?),
            "distance" => match parse_cards(need()?)?.as_slice() {
                [a, b] => StatisticKind::Distance(*a, *b),
                _ => return Err(Error::Parse("distance takes two cards".into())),
            },
            "block_sets" => StatisticKind::BlockSets(parse_usize(need()?)?),
            "modular_hands" => StatisticKind::ModularHands(parse_usize(need()?)?),
            other => return Err(Error::Parse(format!("unknown statistic {other:?}"))),
        };
        let takes_arg = !matches!(kind, StatisticKind::TopCard | StatisticKind::Parity);
        if arg.is_some() && !takes_arg {
            return Err(Error::Parse(format!("statistic {name} takes no argument")));
        }
        Ok(kind)
    }
}

fn cards_arg(v: &[Card]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatisticKind::TopCard => f.write_str("top_card"),
            StatisticKind::Parity => f.write_str("parity"),
            StatisticKind::TopKOrder(k) => write!(f, "top_k_order:{k}"),
            StatisticKind::TopKSet(k) => write!(f, "top_k_set:{k}"),
            StatisticKind::PositionOf(c) => write!(f, "position_of:{c}"),
            StatisticKind::PositionsOf(s) => write!(f, "positions_of:{}", cards_arg(s)),
            StatisticKind::CardAbove(c) => write!(f, "card_above:{c}"),
            StatisticKind::CardBelow(c) => write!(f, "card_below:{c}"),
            StatisticKind::RelativeOrder(s) => write!(f, "relative_order:{}", cards_arg(s)),
            StatisticKind::Distance(a, b) => write!(f, "distance:{a},{b}"),
            StatisticKind::BlockSets(b) => write!(f, "block_sets:{b}"),
            StatisticKind::ModularHands(m) => write!(f, "modular_hands:{m}"),
        }
    }
}

impl Serialize for StatisticKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
