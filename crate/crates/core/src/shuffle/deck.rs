use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Card label, `1..=n`.
pub type Card = u8;

/// Largest deck size for which dense state-space computations run.
pub const MAX_DENSE_N: usize = 8;

/// Arrangement of cards `1..=n`; index 0 is the top of the deck.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Card>", into = "Vec<Card>")]
pub struct Deck {
    order: Vec<Card>,
}

/// A single move of the move-based chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Move {
    /// Take the card with this label and put it on top.
    ToTop(Card),
    /// Move the top card to the bottom.
    TopToBottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::ToTop(c) => write!(f, "to_top({c})"),
            Move::TopToBottom => f.write_str("top_to_bottom"),
        }
    }
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl Deck {
    /// Validates that `order` is a permutation of `1..=n` with `2 <= n <= 255`.
    pub fn new(order: Vec<Card>) -> Result<Self> {
        let n = order.len();
        if n < 2 {
            return Err(Error::param(format!("deck needs at least 2 cards, got {n}")));
        }
        let mut seen = vec![false; n];
        for &c in &order {
            let i = (c as usize).wrapping_sub(1);
            if i >= n || seen[i] {
                return Err(Error::param(format!(
                    "{order:?} is not a permutation of 1..={n}"
                )));
            }
            seen[i] = true;
        }
        Ok(Self { order })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n > Card::MAX as usize {
            return Err(Error::param(format!("deck size {n} exceeds {}", Card::MAX)));
        }
        Self::new((1..=n as Card).collect())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn cards(&self) -> &[Card] {
        &self.order
    }

    /// Card at 1-based position `pos`.
    pub fn card_at(&self, pos: usize) -> Option<Card> {
        pos.checked_sub(1).and_then(|i| self.order.get(i)).copied()
    }

    /// 1-based position of `card`.
    pub fn position_of(&self, card: Card) -> Option<usize> {
        self.order.iter().position(|&c| c == card).map(|i| i + 1)
    }

    pub fn apply(&self, mv: Move) -> Result<Deck> {
        let mut order = self.order.clone();
        match mv {
            Move::ToTop(c) => {
                let i = self
                    .position_of(c)
                    .ok_or_else(|| Error::param(format!("unknown card {c}")))?
                    - 1;
                order[..=i].rotate_right(1);
            }
            Move::TopToBottom => order.rotate_left(1),
        }
        Ok(Deck { order })
    }

    /// Sign of the deck read as a permutation of `1..=n`.
    pub fn parity(&self) -> Parity {
        let mut seen = vec![false; self.len()];
        let mut transpositions = 0;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut i = start;
            let mut cycle = 0;
            while !seen[i] {
                seen[i] = true;
                i = self.order[i] as usize - 1;
                cycle += 1;
            }
            transpositions += cycle - 1;
        }
        if transpositions % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Lexicographic (Lehmer) rank in `0..n!`.
    pub fn rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller = self.order[i + 1..]
                .iter()
                .filter(|&&c| c < self.order[i])
                .count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    /// Inverse of [`Deck::rank`].
    pub fn unrank(rank: usize, n: usize) -> Result<Deck> {
        if !(2..=20).contains(&n) || rank >= factorial(n) {
            return Err(Error::param(format!("rank {rank} invalid for n = {n}")));
        }
        let mut digits = vec![0; n];
        let mut r = rank;
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = r % base;
            r /= base;
        }
        let mut pool: Vec<Card> = (1..=n as Card).collect();
        let order = digits.into_iter().map(|d| pool.remove(d)).collect();
        Ok(Deck { order })
    }

    /// All decks of size `n` in rank order.
    pub fn all(n: usize) -> Result<impl Iterator<Item = Deck>> {
        check_dense(n)?;
        Ok((0..factorial(n)).map(move |r| Deck::unrank(r, n).expect("rank in range")))
    }
}

pub(crate) fn check_dense(n: usize) -> Result<()> {
    if (2..=MAX_DENSE_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::DenseRange {
            n,
            max: MAX_DENSE_N,
        })
    }
}

impl TryFrom<Vec<Card>> for Deck {
    type Error = Error;

    fn try_from(order: Vec<Card>) -> Result<Self> {
        Deck::new(order)
    }
}

impl From<Deck> for Vec<Card> {
    fn from(d: Deck) -> Self {
        d.order
    }
}

impl fmt::Display for Deck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.order.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deck(v: &[Card]) -> Deck {
        Deck::new(v.to_vec()).unwrap()
    }

    #[test]
    fn move_examples() {
        let d = deck(&[1, 2, 3]);
        assert_eq!(d.apply(Move::ToTop(1)).unwrap(), d);
        assert_eq!(d.apply(Move::ToTop(3)).unwrap(), deck(&[3, 1, 2]));
        assert_eq!(d.apply(Move::TopToBottom).unwrap(), deck(&[2, 3, 1]));
        assert!(d.apply(Move::ToTop(4)).is_err());
    }

    #[test]
    fn parity_examples() {
        assert_eq!(deck(&[1, 2, 3]).parity(), Parity::Even);
        assert_eq!(deck(&[2, 1, 3]).parity(), Parity::Odd);
        assert_eq!(deck(&[3, 1, 2]).parity(), Parity::Even);
    }

    #[test]
    fn rank_round_trip() {
        for n in 2..=5 {
            for (r, d) in Deck::all(n).unwrap().enumerate() {
                assert_eq!(d.rank(), r);
            }
        }
        assert_eq!(Deck::identity(4).unwrap().rank(), 0);
        assert_eq!(deck(&[4, 3, 2, 1]).rank(), 23);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Deck::new(vec![1]).is_err());
        assert!(Deck::new(vec![1, 1]).is_err());
        assert!(Deck::new(vec![0, 1]).is_err());
        assert!(serde_json::from_str::<Deck>("[2,3,1]").is_ok());
        assert!(serde_json::from_str::<Deck>("[2,2,1]").is_err());
        assert_eq!(serde_json::to_string(&deck(&[2, 3, 1])).unwrap(), "[2,3,1]");
    }

    #[test]
    fn dense_range() {
        assert!(Deck::all(9).is_err());
        assert!(matches!(check_dense(1), Err(Error::DenseRange { .. })));
    }
}
