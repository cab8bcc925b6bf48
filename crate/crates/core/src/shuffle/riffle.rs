//! Inverse riffle shuffles driven by per-card binary strings.
//!
//! Bit convention: bit `s - 1` of a card's key is the bit drawn at step
//! `s`. One step stably sorts the deck by that bit (zeros first). Doing
//! steps `1..=t` in turn is an LSD radix sort, so it equals one stable
//! sort by the whole key read as an integer, with the last step's bit
//! most significant.

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::deck::{Card, Deck};
use crate::rational::{ratio_big, Rational};
use crate::{Error, Result};

/// Longest string length supported per card.
pub const MAX_STRING_BITS: usize = 24;

/// One binary string of common length `t` per card.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StringAssignment {
    bits: usize,
    keys: Vec<u32>,
}

impl StringAssignment {
    /// `keys[c - 1]` is the string of card `c`, with step `s` in bit `s - 1`.
    pub fn new(bits: usize, keys: Vec<u32>) -> Result<Self> {
        if bits > MAX_STRING_BITS {
            return Err(Error::param(format!(
                "strings of {bits} bits exceed the {MAX_STRING_BITS}-bit limit"
            )));
        }
        if let Some(k) = keys.iter().find(|&&k| (k as u64) >> bits != 0) {
            return Err(Error::param(format!("key {k} does not fit in {bits} bits")));
        }
        Ok(Self { bits, keys })
    }

    /// Builds from per-step bit rows: `rows[s][c - 1]` is card `c`'s bit at step `s + 1`.
    pub fn from_steps(rows: &[Vec<bool>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("step rows have different lengths"));
        }
        let mut keys = vec![0u32; n];
        for (s, row) in rows.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                keys[c] |= (b as u32) << s;
            }
        }
        Self::new(rows.len(), keys)
    }

    /// String length `t`.
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn cards(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[u32] {
        &self.keys
    }

    pub fn key_of(&self, card: Card) -> u32 {
        self.keys[card as usize - 1]
    }

    /// Bits drawn at step `s` (1-based), indexed by card.
    pub fn step(&self, s: usize) -> Vec<bool> {
        self.keys.iter().map(|k| (k >> (s - 1)) & 1 == 1).collect()
    }

    /// The assignment made by the first `s` steps only.
    pub fn truncated(&self, s: usize) -> StringAssignment {
        let s = s.min(self.bits);
        let mask = if s == 32 { u32::MAX } else { (1u32 << s) - 1 };
        StringAssignment {
            bits: s,
            keys: self.keys.iter().map(|k| k & mask).collect(),
        }
    }

    /// Keys in ascending order.
    pub fn sorted_keys(&self) -> Vec<u32> {
        let mut k = self.keys.clone();
        k.sort_unstable();
        k
    }

    pub fn all_distinct(&self) -> bool {
        self.sorted_keys().windows(2).all(|w| w[0] != w[1])
    }

    /// String of a card as written, first step first.
    pub fn string_of(&self, card: Card) -> String {
        let k = self.key_of(card);
        (0..self.bits)
            .map(|s| if (k >> s) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for StringAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in 1..=self.keys.len() {
            if c > 1 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.string_of(c as Card))?;
        }
        Ok(())
    }
}

impl Serialize for StringAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.keys.len()))?;
        for c in 1..=self.keys.len() {
            seq.serialize_element(&self.string_of(c as Card))?;
        }
        seq.end()
    }
}

/// Stably sorts `deck` by the cards' strings.
pub fn inverse_riffle_apply(deck: &Deck, assignment: &StringAssignment) -> Result<Deck> {
    if assignment.cards() != deck.len() {
        return Err(Error::param(format!(
            "assignment covers {} cards, deck has {}",
            assignment.cards(),
            deck.len()
        )));
    }
    let mut order = deck.cards().to_vec();
    order.sort_by_key(|&c| assignment.key_of(c));
    Deck::new(order)
}

/// Number of assignments of `bits`-bit strings to `n` cards, if it fits in `u64`.
pub(crate) fn assignment_count(n: usize, bits: usize) -> Option<u64> {
    let exp = n.checked_mul(bits)?;
    if exp >= 64 {
        None
    } else {
        Some(1u64 << exp)
    }
}

/// The assignment with index `idx`: card `c` takes bits `[(c-1)t, ct)` of `idx`.
pub(crate) fn assignment_from_index(n: usize, bits: usize, idx: u64) -> StringAssignment {
    let mask = (1u64 << bits) - 1;
    let keys = (0..n)
        .map(|c| ((idx >> (c * bits)) & mask) as u32)
        .collect();
    StringAssignment { bits, keys }
}

/// One enumerated outcome of `t` inverse riffle steps from the identity.
#[derive(Clone, Debug, Serialize)]
pub struct RiffleOutcome {
    pub assignment: StringAssignment,
    pub deck: Deck,
    #[serde(with = "crate::rational::serde_str")]
    pub weight: Rational,
}

/// Every assignment of `t`-bit strings to `n` cards with its deck and weight `2^(-tn)`.
pub fn enumerate_riffle(n: usize, t: usize, budget: u64) -> Result<Vec<RiffleOutcome>> {
    let start = Deck::identity(n)?;
    if t > MAX_STRING_BITS {
        return Err(Error::param(format!("t = {t} exceeds {MAX_STRING_BITS}")));
    }
    let count = match assignment_count(n, t) {
        Some(c) if c <= budget => c,
        other => {
            return Err(Error::BudgetExceeded {
                required: other.map_or_else(|| format!("2^{}", n * t), |c| c.to_string()),
                budget,
                hint: "use the Monte-Carlo sampler instead",
            })
        }
    };
    let weight = ratio_big(1u32.into(), num_bigint::BigUint::from(1u8) << (n * t));
    (0..count)
        .map(|idx| {
            let assignment = assignment_from_index(n, t, idx);
            let deck = inverse_riffle_apply(&start, &assignment)?;
            Ok(RiffleOutcome {
                assignment,
                deck,
                weight: weight.clone(),
            })
        })
        .collect()
}
