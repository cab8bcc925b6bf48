use serde::Serialize;

use super::coloring::{Color, Coloring, HalfPosition};
use crate::{Error, Result};

/// `max - min` of the running red-minus-blue count around the cycle.
pub fn compute_k(c: &Coloring) -> usize {
    let (mut d, mut lo, mut hi) = (0i64, 0i64, 0i64);
    for &m in c.marks() {
        d += if m == Color::Red { 1 } else { -1 };
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (hi - lo) as usize
}

/// A set of vertices whose colors alternate around the cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlternatingSet {
    /// Members in increasing vertex order.
    pub vertices: Vec<usize>,
    /// Members as red/blue pairs `R, B, R, B, ...`; each blue follows its red going forward.
    pub chain: Vec<usize>,
}

impl AlternatingSet {
    /// Builds a set from arbitrary members, checking that colors alternate cyclically.
    pub fn from_vertices(c: &Coloring, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut vertices: Vec<usize> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.iter().any(|&v| v >= c.size()) {
            return Err(Error::param("vertex outside the cycle"));
        }
        if !alternates(c, &vertices) {
            return Err(Error::param(format!("vertices {vertices:?} do not alternate in color")));
        }
        let first_red = vertices.iter().position(|&v| c.color(v) == Color::Red).unwrap_or(0);
        let mut chain = vertices.clone();
        chain.rotate_left(first_red);
        Ok(Self { vertices, chain })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// The red/blue pairs of the chain.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.chain.chunks_exact(2).map(|p| (p[0], p[1]))
    }
}

fn alternates(c: &Coloring, sorted: &[usize]) -> bool {
    sorted.len() >= 2
        && sorted.len().is_multiple_of(2)
        && (0..sorted.len()).all(|i| c.color(sorted[i]) != c.color(sorted[(i + 1) % sorted.len()]))
}

/// Index of the vertex right after the first global minimum of the running red-minus-blue count.
pub fn decomposition_start(c: &Coloring) -> usize {
    let (mut d, mut lo, mut at) = (0i64, 0i64, 0usize);
    for (i, &m) in c.marks().iter().enumerate() {
        d += if m == Color::Red { 1 } else { -1 };
        if d < lo {
            lo = d;
            at = i + 1;
        }
    }
    at % c.size()
}

/// Splits the cycle into `k` alternating sets `{R_i, B_i, R_{k+i}, B_{k+i}, ...}`.
///
/// Reds and blues are numbered in visiting order from
/// [`decomposition_start`], where the running count never goes negative.
pub fn alternating_decomposition(c: &Coloring) -> Vec<AlternatingSet> {
    let size = c.size();
    let start = decomposition_start(c);
    let (mut reds, mut blues) = (Vec::new(), Vec::new());
    for j in 0..size {
        let v = (start + j) % size;
        match c.color(v) {
            Color::Red => reds.push(v),
            Color::Blue => blues.push(v),
        }
    }
    let k = compute_k(c);
    (0..k)
        .map(|i| {
            let chain: Vec<usize> = (i..size / 2).step_by(k).flat_map(|j| [reds[j], blues[j]]).collect();
            let mut vertices = chain.clone();
            vertices.sort_unstable();
            AlternatingSet { vertices, chain }
        })
        .collect()
}

fn forward(size: usize, u: usize, v: usize) -> usize {
    (v + size - u) % size
}

/// Largest forward distance between cyclically consecutive members, including the wrap-around.
pub fn max_gap(a: &AlternatingSet, cycle_size: usize) -> usize {
    let v = &a.vertices;
    match v.len() {
        0 => 0,
        1 => cycle_size,
        len => (0..len)
            .map(|i| forward(cycle_size, v[i], v[(i + 1) % len]))
            .max()
            .unwrap_or(0),
    }
}

/// Largest forward distance between consecutive chain entries, without the closing pair.
pub fn chain_gap(a: &AlternatingSet, cycle_size: usize) -> usize {
    a.chain
        .windows(2)
        .map(|w| forward(cycle_size, w[0], w[1]))
        .max()
        .unwrap_or(0)
}

/// Midpoint of each member-free arc between cyclically consecutive members.
///
/// A two-member set gets one midpoint per arc.
pub fn midpoints(a: &AlternatingSet, cycle_size: usize) -> Vec<HalfPosition> {
    let v = &a.vertices;
    let mut mids: Vec<HalfPosition> = (0..v.len())
        .map(|i| {
            let d = match forward(cycle_size, v[i], v[(i + 1) % v.len()]) {
                0 => cycle_size,
                d => d,
            };
            HalfPosition((2 * v[i] + d) % (2 * cycle_size))
        })
        .collect();
    mids.sort_unstable();
    mids.dedup();
    mids
}

/// For each chain pair `(R_j, B_j)`: the midpoint of the forward arc from `R_j` to `B_j` and its antipode.
pub fn pair_midpoints(a: &AlternatingSet, cycle_size: usize) -> Vec<Vec<HalfPosition>> {
    a.pairs()
        .map(|(r, b)| {
            let m = (2 * r + forward(cycle_size, r, b)) % (2 * cycle_size);
            let mut g = vec![HalfPosition(m), HalfPosition((m + cycle_size) % (2 * cycle_size))];
            g.sort_unstable();
            g
        })
        .collect()
}

/// True when the sets are disjoint, cover every vertex, and each alternates.
pub fn is_alternating_partition(c: &Coloring, sets: &[AlternatingSet]) -> bool {
    let mut seen = vec![false; c.size()];
    for s in sets {
        if !alternates(c, &s.vertices) {
            return false;
        }
        for &v in &s.vertices {
            if v >= c.size() || seen[v] {
                return false;
            }
            seen[v] = true;
        }
    }
    seen.into_iter().all(|b| b)
}

/// Whether the cycle splits into exactly `m` alternating sets, optionally with every cyclic gap at most `gap_bound`.
///
/// Exhaustive backtracking; intended for cycles of up to about 16 vertices.
pub fn exists_alternating_partition(c: &Coloring, m: usize, gap_bound: Option<usize>) -> bool {
    if m == 0 {
        return false;
    }
    let mut sets: Vec<Vec<usize>> = Vec::new();
    search(c, m, gap_bound, 0, &mut sets)
}

fn search(c: &Coloring, m: usize, gap: Option<usize>, v: usize, sets: &mut Vec<Vec<usize>>) -> bool {
    let size = c.size();
    if v == size {
        return sets.len() == m
            && sets.iter().all(|s| {
                let (first, last) = (s[0], s[s.len() - 1]);
                s.len() >= 2
                    && c.color(first) != c.color(last)
                    && gap.is_none_or(|g| forward(size, last, first) <= g)
            });
    }
    // a set whose next member would come too late can never be completed
    if let Some(g) = gap {
        if sets.iter().any(|s| v - s[s.len() - 1] > g) {
            return false;
        }
    }
    for i in 0..sets.len() {
        let last = sets[i][sets[i].len() - 1];
        if c.color(last) != c.color(v) {
            sets[i].push(v);
            if search(c, m, gap, v + 1, sets) {
                return true;
            }
            sets[i].pop();
        }
    }
    if sets.len() < m {
        sets.push(vec![v]);
        if search(c, m, gap, v + 1, sets) {
            return true;
        }
        sets.pop();
    }
    false
}
