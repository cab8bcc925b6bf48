use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::shuffle::{Card, Move};
use crate::{Error, Result};

/// The shuffle chains whose paths can be enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainFamily {
    /// Move a uniformly chosen card to the top.
    RandomToTop,
    /// With probability 1/2 random-to-top, otherwise top card to bottom.
    Walk1,
    /// Assign each card a fresh bit and stably sort by it.
    InverseRiffle,
}

impl ChainFamily {
    /// Per-step moves as `(move, numerator)` over the common denominator [`Self::step_denominator`].
    pub(crate) fn weighted_moves(self, n: usize) -> Vec<(Move, u128)> {
        let to_top = (1..=n as Card).map(|c| (Move::ToTop(c), 1));
        match self {
            ChainFamily::RandomToTop => to_top.collect(),
            ChainFamily::Walk1 => to_top.chain([(Move::TopToBottom, n as u128)]).collect(),
            ChainFamily::InverseRiffle => Vec::new(),
        }
    }

    /// Denominator shared by all one-step weights.
    pub(crate) fn step_denominator(self, n: usize) -> u128 {
        match self {
            ChainFamily::RandomToTop => n as u128,
            ChainFamily::Walk1 => 2 * n as u128,
            ChainFamily::InverseRiffle => 1u128 << n,
        }
    }

    /// Number of weighted branches of a length-`t` path tree, if it fits in `u128`.
    pub fn branch_count(self, n: usize, t: usize) -> Option<u128> {
        let per_step: u128 = match self {
            ChainFamily::RandomToTop => n as u128,
            ChainFamily::Walk1 => n as u128 + 1,
            ChainFamily::InverseRiffle => 1u128.checked_shl(n as u32)?,
        };
        (0..t).try_fold(1u128, |acc, _| acc.checked_mul(per_step))
    }

    pub(crate) fn check_budget(self, n: usize, t: usize, budget: u64) -> Result<u128> {
        match self.branch_count(n, t) {
            Some(b) if b <= budget as u128 => Ok(b),
            other => Err(Error::BudgetExceeded {
                required: other.map_or_else(|| "more than 2^128".to_string(), |b| b.to_string()),
                budget,
                hint: "use Monte-Carlo mode (--samples K --seed X)",
            }),
        }
    }

    pub fn is_riffle(self) -> bool {
        self == ChainFamily::InverseRiffle
    }
}

impl FromStr for ChainFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rtt" | "random_to_top" => Ok(ChainFamily::RandomToTop),
            "walk1" => Ok(ChainFamily::Walk1),
            "riffle" | "inverse_riffle" => Ok(ChainFamily::InverseRiffle),
            other => Err(Error::Parse(format!("unknown chain {other:?}"))),
        }
    }
}

impl fmt::Display for ChainFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainFamily::RandomToTop => "rtt",
            ChainFamily::Walk1 => "walk1",
            ChainFamily::InverseRiffle => "riffle",
        })
    }
}

impl Serialize for ChainFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
