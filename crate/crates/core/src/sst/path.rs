use num_bigint::BigUint;
use serde::Serialize;

use super::family::ChainFamily;
use crate::rational::{ratio_big, Rational};
use crate::shuffle::{
    assignment_count, assignment_from_index, inverse_riffle_apply, Deck, Move, StringAssignment, MAX_STRING_BITS,
};
use crate::{Error, Exec, Result};

/// The random choices of one path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathSteps {
    Moves(Vec<Move>),
    Riffle(StringAssignment),
}

/// A weighted path of a shuffle chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Path {
    pub start: Deck,
    pub steps: PathSteps,
    #[serde(with = "crate::rational::serde_str")]
    pub weight: Rational,
    pub end: Deck,
}

impl Path {
    /// Number of steps.
    pub fn len(&self) -> usize {
        match &self.steps {
            PathSteps::Moves(m) => m.len(),
            PathSteps::Riffle(a) => a.bits(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A complete path as handed to an enumeration visitor.
pub(crate) enum PathRef<'a> {
    Moves {
        moves: &'a [Move],
        /// `decks[i]` is the deck after `i + 1` moves.
        decks: &'a [Deck],
        numerator: u128,
    },
    Riffle {
        assignment: &'a StringAssignment,
        deck: &'a Deck,
    },
}

impl PathRef<'_> {
    pub(crate) fn numerator(&self) -> u128 {
        match self {
            PathRef::Moves { numerator, .. } => *numerator,
            PathRef::Riffle { .. } => 1,
        }
    }

    pub(crate) fn end<'b>(&'b self, start: &'b Deck) -> &'b Deck {
        match self {
            PathRef::Moves { decks, .. } => decks.last().unwrap_or(start),
            PathRef::Riffle { deck, .. } => deck,
        }
    }
}

/// Common denominator of all path weights of length `t`.
pub(crate) fn path_denominator(family: ChainFamily, n: usize, t: usize) -> Result<u128> {
    family
        .step_denominator(n)
        .checked_pow(t as u32)
        .ok_or_else(|| Error::param(format!("path weights for n = {n}, t = {t} overflow 128 bits")))
}

pub(crate) fn check_inputs(family: ChainFamily, n: usize, t: usize, start: &Deck, budget: u64) -> Result<u128> {
    if n < 2 {
        return Err(Error::param("deck needs at least 2 cards"));
    }
    if start.len() != n {
        return Err(Error::param(format!("start deck has {} cards, expected {n}", start.len())));
    }
    if family.is_riffle() && t > MAX_STRING_BITS {
        return Err(Error::param(format!("t = {t} exceeds {MAX_STRING_BITS}")));
    }
    family.check_budget(n, t, budget)?;
    path_denominator(family, n, t)
}

const TARGET_TASKS: u128 = 256;

/// Visits every path of length `t` from `start`, folding each partition into its own accumulator.
///
/// Partitions are fixed move prefixes (or index ranges for riffle chains)
/// and come back in a fixed order, so any exact merge is deterministic.
pub(crate) fn fold_paths<A, I, V>(
    family: ChainFamily,
    n: usize,
    t: usize,
    start: &Deck,
    exec: Exec,
    init: I,
    visit: V,
) -> Vec<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, &PathRef<'_>) + Sync + Send,
{
    if family.is_riffle() {
        let total = assignment_count(n, t).expect("checked by budget") as usize;
        let chunk = (total / TARGET_TASKS as usize).max(1024);
        return exec.map(&Exec::chunks(total, chunk), |range| {
            let mut acc = init();
            for idx in range.clone() {
                let assignment = assignment_from_index(n, t, idx as u64);
                let deck = inverse_riffle_apply(start, &assignment).expect("valid deck");
                visit(&mut acc, &PathRef::Riffle { assignment: &assignment, deck: &deck });
            }
            acc
        });
    }

    let moves = family.weighted_moves(n);
    let b = moves.len() as u128;
    let mut depth = 0;
    let mut tasks = 1u128;
    while depth < t && tasks < TARGET_TASKS {
        depth += 1;
        tasks *= b;
    }
    exec.map_range(0..tasks as usize, |task| {
        let mut acc = init();
        let mut seq = Vec::with_capacity(t);
        let mut decks: Vec<Deck> = Vec::with_capacity(t);
        let mut numerator = 1u128;
        let mut rest = task;
        let mut digits = vec![0usize; depth];
        for d in digits.iter_mut().rev() {
            *d = rest % moves.len();
            rest /= moves.len();
        }
        for d in digits {
            let (mv, w) = moves[d];
            let next = decks.last().unwrap_or(start).apply(mv).expect("valid move");
            seq.push(mv);
            decks.push(next);
            numerator *= w;
        }
        descend(&moves, t, start, &mut seq, &mut decks, numerator, &mut acc, &visit);
        acc
    })
}

#[allow(clippy::too_many_arguments)]
fn descend<A, V>(
    moves: &[(Move, u128)],
    t: usize,
    start: &Deck,
    seq: &mut Vec<Move>,
    decks: &mut Vec<Deck>,
    numerator: u128,
    acc: &mut A,
    visit: &V,
) where
    V: Fn(&mut A, &PathRef<'_>),
{
    if seq.len() == t {
        visit(acc, &PathRef::Moves { moves: seq, decks, numerator });
        return;
    }
    for &(mv, w) in moves {
        let next = decks.last().unwrap_or(start).apply(mv).expect("valid move");
        seq.push(mv);
        decks.push(next);
        descend(moves, t, start, seq, decks, numerator * w, acc, visit);
        seq.pop();
        decks.pop();
    }
}

/// Every path of length `t` from `start` with its exact weight.
///
/// Move chains branch `n` (random-to-top) or `n + 1` (top-to-bottom
/// mixture) ways per step; riffle chains branch `2^n` ways. The total
/// branch count must not exceed `budget`.
pub fn enumerate_paths(family: ChainFamily, n: usize, t: usize, start: &Deck, budget: u64) -> Result<Vec<Path>> {
    let den = BigUint::from(check_inputs(family, n, t, start, budget)?);
    let parts = fold_paths(family, n, t, start, Exec::Sequential, Vec::new, |acc: &mut Vec<Path>, p| {
        let steps = match p {
            PathRef::Moves { moves, .. } => PathSteps::Moves(moves.to_vec()),
            PathRef::Riffle { assignment, .. } => PathSteps::Riffle((*assignment).clone()),
        };
        acc.push(Path {
            start: start.clone(),
            steps,
            weight: ratio_big(p.numerator().into(), den.clone()),
            end: p.end(start).clone(),
        });
    });
    Ok(parts.into_iter().flatten().collect())
}
