//! Shuffle chains on decks of `n` cards and the deck statistics catalog.

mod deck;
mod riffle;
mod statistic;

pub use deck::{Card, Deck, Move, Parity, MAX_DENSE_N};
pub use riffle::{enumerate_riffle, inverse_riffle_apply, RiffleOutcome, StringAssignment, MAX_STRING_BITS};
pub use statistic::{stationary_statistic_distribution, OnRanks, StatValue, StatisticKind};

pub(crate) use deck::{check_dense, factorial};
pub(crate) use riffle::{assignment_count, assignment_from_index};

use crate::dist::Kernel;
use crate::rational::{ratio, Rational};
use crate::{Exec, Result};

/// Moves of random-to-top with their probabilities: each `ToTop(c)` at `1/n`.
pub fn random_to_top_moves(n: usize) -> Vec<(Move, Rational)> {
    (1..=n as Card)
        .map(|c| (Move::ToTop(c), ratio(1, n as i64)))
        .collect()
}

/// Moves of the top-to-bottom mixture: `ToTop(c)` at `1/(2n)`, `TopToBottom` at `1/2`.
pub fn walk1_moves(n: usize) -> Vec<(Move, Rational)> {
    let mut moves: Vec<(Move, Rational)> = (1..=n as Card)
        .map(|c| (Move::ToTop(c), ratio(1, 2 * n as i64)))
        .collect();
    moves.push((Move::TopToBottom, ratio(1, 2)));
    moves
}

fn dense_kernel(n: usize, moves: Vec<(Move, Rational)>, exec: Exec) -> Result<Kernel> {
    check_dense(n)?;
    let rows = exec.map_range(0..factorial(n), |r| {
        let deck = Deck::unrank(r, n).expect("rank in range");
        moves
            .iter()
            .map(|(mv, p)| (deck.apply(*mv).expect("valid move").rank(), p.clone()))
            .collect()
    });
    Kernel::new(rows)
}

/// One inverse riffle step on ranked decks: every bit assignment with weight `2^-n`.
pub fn inverse_riffle_kernel(n: usize, exec: Exec) -> Result<Kernel> {
    check_dense(n)?;
    let w = ratio(1, 1 << n);
    let rows = exec.map_range(0..factorial(n), |r| {
        let deck = Deck::unrank(r, n).expect("rank in range");
        (0..1u64 << n)
            .map(|idx| {
                let a = assignment_from_index(n, 1, idx);
                (inverse_riffle_apply(&deck, &a).expect("valid deck").rank(), w.clone())
            })
            .collect()
    });
    Kernel::new(rows)
}

/// Random-to-top on ranked decks of size `n` (`2 <= n <= 8`).
pub fn random_to_top_kernel(n: usize, exec: Exec) -> Result<Kernel> {
    dense_kernel(n, random_to_top_moves(n), exec)
}

/// Half random-to-top, half top-to-bottom, on ranked decks of size `n`.
pub fn walk1_kernel(n: usize, exec: Exec) -> Result<Kernel> {
    dense_kernel(n, walk1_moves(n), exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{evolve, Distribution};

    #[test]
    fn kernel_rows() {
        let k = random_to_top_kernel(3, Exec::Sequential).unwrap();
        let row = k.row(0);
        assert_eq!(row.len(), 3);
        assert!(row.iter().all(|(_, p)| *p == ratio(1, 3)));

        let w = walk1_kernel(3, Exec::Sequential).unwrap();
        let id = Deck::identity(3).unwrap();
        let rotated = Deck::new(vec![2, 3, 1]).unwrap().rank();
        let row = w.row(id.rank());
        assert!(row.contains(&(id.rank(), ratio(1, 6))));
        assert!(row.contains(&(rotated, ratio(1, 2))));
    }

    #[test]
    fn riffle_kernel_matches_enumeration() {
        let k = inverse_riffle_kernel(3, Exec::Sequential).unwrap();
        assert!(k.is_doubly_stochastic());
        let start = Distribution::point_mass(0, 0..6).unwrap();
        let law = evolve(&k, &start, 2, Exec::Sequential).unwrap();
        let mut counts = vec![0u32; 6];
        for o in enumerate_riffle(3, 2, 1000).unwrap() {
            counts[o.deck.rank()] += 1;
        }
        for (r, c) in counts.into_iter().enumerate() {
            assert_eq!(law.weight(&r), ratio(c as i64, 64));
        }
    }

    #[test]
    fn dense_range_is_enforced() {
        assert!(random_to_top_kernel(9, Exec::Parallel).unwrap_err().is_capacity());
        assert!(walk1_kernel(1, Exec::Parallel).is_err());
    }

    #[test]
    fn top_card_uniform_after_one_step() {
        let k = random_to_top_kernel(3, Exec::Parallel).unwrap();
        let start = Distribution::<usize>::point_mass(0, 0..6).unwrap();
        let after = evolve(&k, &start, 1, Exec::Parallel).unwrap();
        let top = crate::dist::push_forward(&after, &StatisticKind::TopCard.on_ranks(3)).unwrap();
        assert!(top.weights().iter().all(|w| *w == ratio(1, 3)));
    }
}
