use mixscope::cycle::{
    alternating_decomposition, chain_gap, check_red_dominance_with_sets, color_separation_series, compute_k,
    coverage_time_tail, coverage_time_tail_with_sets, distance_implies_coverage, exact_color_separation,
    exists_alternating_partition, gambler_moments, is_alternating_partition, lazy_exit_time_moments, max_gap,
    midpoints, pair_midpoints, paired_coverage_time_tail, reflection_balance, red_probability_series,
    vertex_count_tail, AlternatingSet, Color, Coloring, HalfPosition,
};
use mixscope::rational::ratio;
use mixscope::{Exec, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn col(s: &str) -> Coloring {
    s.parse().unwrap()
}

fn balanced_up_to(size: usize) -> Vec<Coloring> {
    (2..=size).step_by(2).flat_map(Coloring::all_balanced).collect()
}

fn evenly_spaced_sets(c: &Coloring) -> Vec<AlternatingSet> {
    let n = c.size();
    vec![
        AlternatingSet::from_vertices(c, (0..n).filter(|v| [0, 2, 3, 5].contains(&(v % 6)))).unwrap(),
        AlternatingSet::from_vertices(c, (0..n).filter(|v| [1, 4].contains(&(v % 6)))).unwrap(),
    ]
}

fn assert_partition(c: &Coloring) {
    let k = compute_k(c);
    let sets = alternating_decomposition(c);
    assert_eq!(sets.len(), k, "{c}");
    assert!(is_alternating_partition(c, &sets), "{c}");
    for s in &sets {
        assert!(s.len() >= 2 && s.len() % 2 == 0, "{c}");
        assert!(chain_gap(s, c.size()) < 2 * k, "{c}");
    }
}

#[test]
fn decomposition_partitions_every_small_cycle() {
    let all = balanced_up_to(12);
    assert_eq!(all.len(), 1 + 2 + 6 + 20 + 70 + 252 + 924 - 1);
    all.iter().for_each(assert_partition);
}

#[test]
fn no_smaller_partition_exists() {
    for c in balanced_up_to(10) {
        let k = compute_k(&c);
        assert!(exists_alternating_partition(&c, k, None), "{c}");
        assert!(k == 1 || !exists_alternating_partition(&c, k - 1, None), "{c}");
    }
}

#[test]
fn closing_gap_can_exceed_the_chain_bound() {
    let c = col("RRBBRB");
    let k = compute_k(&c);
    assert_eq!(k, 2);
    let sets = alternating_decomposition(&c);
    assert!(sets.iter().any(|s| max_gap(s, 6) > 2 * k - 1));
    assert!(sets.iter().all(|s| chain_gap(s, 6) < 2 * k));
    // no alternating partition of this coloring keeps every cyclic gap within 3
    assert!(!exists_alternating_partition(&col("RBBRBRBRRB"), 2, Some(3)));
}

#[test]
fn mod_six_example_sets() {
    let c = col("RRBRBBRRBRBB");
    assert_eq!(compute_k(&c), 2);
    let sets = evenly_spaced_sets(&c);
    assert!(is_alternating_partition(&c, &sets));
    assert_eq!(sets[1].vertices, vec![1, 4, 7, 10]);
    let mids: Vec<f64> = midpoints(&sets[1], 12).iter().map(|h| h.as_f64()).collect();
    assert_eq!(mids, vec![2.5, 5.5, 8.5, 11.5]);
    assert!(sets.iter().all(|s| max_gap(s, 12) <= 3));
}

#[test]
fn pair_rule_bounds_separation_everywhere() {
    let cases = balanced_up_to(10);
    let bad: Vec<String> = Exec::Parallel
        .map(&cases, |c| {
            (0..c.size())
                .filter(|&x0| {
                    let sep = color_separation_series(c, x0, 40).unwrap();
                    let tail = paired_coverage_time_tail(c, x0, 40).unwrap();
                    sep.iter().zip(&tail).any(|(s, t)| s > t)
                })
                .map(|x0| format!("{c}@{x0}"))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn evenly_spaced_sets_bound_separation_from_every_start() {
    let c = col("RRBRBBRRBRBB");
    let sets = evenly_spaced_sets(&c);
    for x0 in 0..12 {
        let sep = color_separation_series(&c, x0, 120).unwrap();
        let tail = coverage_time_tail_with_sets(&c, x0, &sets, 120).unwrap();
        assert!(sep.iter().zip(&tail).all(|(s, t)| s <= t), "x0={x0}");
    }
}

#[test]
fn any_midpoint_rule_fails_for_uneven_sets() {
    let c = col("RBRRBB");
    let sep = color_separation_series(&c, 0, 4).unwrap();
    let tail = coverage_time_tail(&c, 0, 4).unwrap();
    assert!(tail[1].is_zero());
    assert_eq!(sep[2], ratio(1, 8));
}

#[test]
fn pair_reflection_is_fair() {
    for c in balanced_up_to(10) {
        let n = c.size();
        for s in alternating_decomposition(&c) {
            for ((r, b), mids) in s.pairs().zip(pair_midpoints(&s, n)) {
                for x0 in 0..n {
                    let bal = reflection_balance(&c, x0, std::slice::from_ref(&mids), &[r], &[b], 12).unwrap();
                    assert!(bal.iter().all(|z| z.red == z.blue), "{c} pair ({r},{b}) x0={x0}");
                }
            }
        }
    }
}

#[test]
fn evenly_spaced_set_reflection_is_fair() {
    let c = col("RRBRBBRRBRBB");
    for set in evenly_spaced_sets(&c) {
        let (reds, blues): (Vec<usize>, Vec<usize>) = set.vertices.iter().partition(|&&v| c.color(v) == Color::Red);
        for x0 in 0..12 {
            let bal = reflection_balance(&c, x0, &[midpoints(&set, 12)], &reds, &blues, 30).unwrap();
            assert!(bal.iter().all(|z| z.red == z.blue), "x0={x0}");
        }
    }
}

#[test]
fn uneven_set_reflection_is_unfair() {
    let c = col("RBRRBB");
    let sets = alternating_decomposition(&c);
    let unfair = sets.iter().any(|set| {
        let (reds, blues): (Vec<usize>, Vec<usize>) = set.vertices.iter().partition(|&&v| c.color(v) == Color::Red);
        let bal = reflection_balance(&c, 0, &[midpoints(set, 6)], &reds, &blues, 10).unwrap();
        bal.iter().any(|z| z.red != z.blue)
    });
    assert!(unfair);
}

#[test]
fn walking_far_enough_crosses_every_set() {
    for c in balanced_up_to(10) {
        let sets = alternating_decomposition(&c);
        for x0 in 0..c.size() {
            assert!(distance_implies_coverage(&c, x0, &sets).unwrap(), "{c} x0={x0}");
        }
    }
}

#[test]
fn alternating_coloring_mixes_in_one_step() {
    let c = col("RBRBRB");
    assert_eq!(compute_k(&c), 1);
    let sep = color_separation_series(&c, 0, 5).unwrap();
    assert!(sep[0].is_one());
    assert!(sep[1..].iter().all(Zero::is_zero));
    assert!(coverage_time_tail(&c, 0, 5).unwrap()[1..].iter().all(Zero::is_zero));
}

#[test]
fn separation_routes_agree() {
    for c in ["RRBB", "RBRRBB", "RRRBBB", "RRBRBBRB"] {
        let c = col(c);
        let series = color_separation_series(&c, 1, 12).unwrap();
        for (t, sep) in series.iter().enumerate() {
            assert_eq!(*sep, exact_color_separation(&c, 1, t as u64).unwrap(), "{c} t={t}");
        }
        let red = red_probability_series(&c, 1, 12).unwrap();
        assert!(red.iter().all(|p| *p >= Rational::zero() && *p <= Rational::one()));
    }
}

/// Solves `A x = b` over the rationals by Gauss-Jordan elimination.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Vec<Rational> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero()).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::one() / a[col][col].clone();
        a[col].iter_mut().for_each(|x| *x *= &inv);
        b[col] *= &inv;
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    b
}

/// First and second moments of the lazy walk's exit time from `(-d, d)`, started at 0.
fn exit_moments_by_linear_solve(d: i64) -> (Rational, Rational) {
    let states: Vec<i64> = (-d + 1..d).collect();
    let m = states.len();
    let step = [(-1, ratio(1, 4)), (0, ratio(1, 2)), (1, ratio(1, 4))];
    let system = || {
        let mut a = vec![vec![Rational::zero(); m]; m];
        for (i, &x) in states.iter().enumerate() {
            a[i][i] += Rational::one();
            for (dx, p) in &step {
                if (x + dx).abs() < d {
                    a[i][(x + dx + d - 1) as usize] -= p.clone();
                }
            }
        }
        a
    };
    let first = solve(system(), vec![Rational::one(); m]);
    // E[T^2](x) = 1 + 2 sum P(x,y) E[T](y) + sum P(x,y) E[T^2](y)
    let rhs = states
        .iter()
        .map(|&x| {
            let mut v = Rational::one();
            for (dx, p) in &step {
                if (x + dx).abs() < d {
                    v += ratio(2, 1) * p * &first[(x + dx + d - 1) as usize];
                }
            }
            v
        })
        .collect();
    let second = solve(system(), rhs);
    (first[(d - 1) as usize].clone(), second[(d - 1) as usize].clone())
}

#[test]
fn exit_time_moments_match_linear_algebra() {
    for d in 1..=9u64 {
        let (mean, second) = exit_moments_by_linear_solve(d as i64);
        let m = lazy_exit_time_moments(d).unwrap();
        assert_eq!(m.mean, mean, "d={d}");
        assert_eq!(m.variance, &second - &mean * &mean, "d={d}");
    }
}

#[test]
fn stated_gambler_moments() {
    for k in 1..=100u64 {
        let g = gambler_moments(k).unwrap();
        let exact = lazy_exit_time_moments(2 * k - 1).unwrap();
        assert_eq!(g.mean, exact.mean);
        assert!(g.mean_within(k) && g.stdev_within(k));
        assert!(exact.mean_within(k), "k={k}");
        // the true spread exceeds (8/sqrt3) k^2 once k >= 4
        assert_eq!(exact.stdev_within(k), k <= 3, "k={k}");
    }
    // for k = 1 the stated variance is 0 while a Geometric(1/2) exit time has variance 2
    assert!(gambler_moments(1).unwrap().variance.is_zero());
}

#[test]
fn red_dominance_on_the_example() {
    let c = col("RRBRBBRRBRBB");
    let r = check_red_dominance_with_sets(&c, 0, &evenly_spaced_sets(&c), 200).unwrap();
    assert!(r.precondition_holds);
    assert_eq!(r.dominance_holds, Some(true));
    let reds = red_probability_series(&c, 0, 200).unwrap();
    assert!(reds.iter().all(|p| *p >= ratio(1, 2)));
}

#[test]
fn vertex_count_rule_is_reported_separately() {
    let c = col("RRBB");
    let tail = vertex_count_tail(&c, 0, 10).unwrap();
    assert!(tail.windows(2).all(|w| w[0] >= w[1]));
    assert!(tail[0].is_one());
}

#[test]
fn half_positions_serialize_as_half_units() {
    assert_eq!(serde_json::to_string(&HalfPosition(5)).unwrap(), "5");
    assert_eq!(HalfPosition(5).as_f64(), 2.5);
    assert_eq!(serde_json::to_string(&col("RBBR")).unwrap(), "\"RBBR\"");
    let parsed: Coloring = serde_json::from_str(r#"["R","B","B","R"]"#).unwrap();
    assert_eq!(parsed, col("RBBR"));
}

fn random_coloring() -> impl Strategy<Value = Coloring> {
    (2usize..=10, any::<u64>()).prop_map(|(half, seed)| {
        Coloring::random(2 * half, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_cycles_decompose(c in random_coloring()) {
        assert_partition(&c);
    }

    #[test]
    fn k_is_rotation_invariant(c in random_coloring(), shift in 0usize..20) {
        let n = c.size();
        let rotated = Coloring::new((0..n).map(|i| c.color(i + shift % n)).collect()).unwrap();
        prop_assert_eq!(compute_k(&rotated), compute_k(&c));
    }

    #[test]
    fn tails_are_nonincreasing(c in random_coloring(), x0 in 0usize..20) {
        let x0 = x0 % c.size();
        for tail in [
            coverage_time_tail(&c, x0, 30).unwrap(),
            paired_coverage_time_tail(&c, x0, 30).unwrap(),
            vertex_count_tail(&c, x0, 30).unwrap(),
        ] {
            prop_assert!(tail.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(tail.iter().all(|p| *p >= Rational::zero() && *p <= Rational::one()));
        }
    }
}
