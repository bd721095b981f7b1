//! Digraph utilities for the matrix case, plus tensor reducibility.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::pattern::{check_index, BoolMatrix, IndexSet, PatternTensor};

/// Largest dimension accepted by the exhaustive reducibility check.
pub const MAX_REDUCIBILITY_DIM: usize = 24;

/// Directed graph on `[n]`, loops allowed. `succ[i - 1]` is the out-neighbourhood of `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    succ: Vec<IndexSet>,
}

impl Digraph {
    pub fn new(n: usize, succ: Vec<IndexSet>) -> Self {
        assert_eq!(succ.len(), n);
        Digraph { n, succ }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn successors(&self, v: usize) -> IndexSet {
        self.succ[v - 1]
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.succ[u - 1].contains(v)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.iter().map(move |v| (u + 1, v)))
    }

    /// Subgraph induced on `keep`, with vertices renumbered in increasing order.
    pub fn induced(&self, keep: IndexSet) -> Digraph {
        let vertices = keep.to_vec();
        let relabel = |v: usize| vertices.iter().position(|&w| w == v).map(|p| p + 1);
        let succ = vertices
            .iter()
            .map(|&u| {
                self.succ[u - 1]
                    .intersection(keep)
                    .iter()
                    .filter_map(relabel)
                    .fold(IndexSet::EMPTY, IndexSet::with)
            })
            .collect();
        Digraph {
            n: vertices.len(),
            succ,
        }
    }

    fn reachable_from(&self, source: usize) -> IndexSet {
        let mut seen = IndexSet::singleton(source);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let next = frontier
                .iter()
                .fold(IndexSet::EMPTY, |acc, v| acc.union(self.succ[v - 1]));
            frontier = IndexSet::from_bits(next.bits() & !seen.bits());
            seen = seen.union(next);
        }
        seen
    }
}

/// `D(M)`: arc `(i, j)` iff cell `(i, j)` is set.
pub fn digraph_of(m: &BoolMatrix) -> Digraph {
    Digraph {
        n: m.dim(),
        succ: m.rows().to_vec(),
    }
}

/// Transposes every arc.
pub fn reverse(d: &Digraph) -> Digraph {
    let mut succ = vec![IndexSet::EMPTY; d.n];
    for (u, v) in d.arcs() {
        succ[v - 1].insert(u);
    }
    Digraph { n: d.n, succ }
}

/// Vertices at the end of some walk of length exactly `k` from `source`.
pub fn exact_length_reach(d: &Digraph, source: usize, k: usize) -> Result<IndexSet> {
    check_index(source, d.n)?;
    if k < 1 {
        return Err(Error::BadLimit(format!("walk length {k} < 1")));
    }
    let mut frontier = IndexSet::singleton(source);
    for _ in 0..k {
        frontier = frontier.iter().fold(IndexSet::EMPTY, |acc, v| acc.union(d.succ[v - 1]));
        if frontier.is_empty() {
            break;
        }
    }
    Ok(frontier)
}

pub fn is_strongly_connected(d: &Digraph) -> bool {
    if d.n == 0 {
        return false;
    }
    let full = IndexSet::full(d.n);
    d.reachable_from(1) == full && reverse(d).reachable_from(1) == full
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Gcd of all cycle lengths of a strongly connected digraph, or `None` if the
/// digraph is not strongly connected.
///
/// With BFS levels `l` from vertex 1, this is the gcd of `l(u) + 1 - l(v)`
/// over all arcs `(u, v)`.
pub fn cycle_gcd(d: &Digraph) -> Option<usize> {
    if !is_strongly_connected(d) {
        return None;
    }
    let mut level = vec![usize::MAX; d.n];
    level[0] = 0;
    let mut queue = VecDeque::from([1usize]);
    while let Some(u) = queue.pop_front() {
        for v in d.succ[u - 1].iter() {
            if level[v - 1] == usize::MAX {
                level[v - 1] = level[u - 1] + 1;
                queue.push_back(v);
            }
        }
    }
    let g = d
        .arcs()
        .map(|(u, v)| (level[u - 1] + 1).abs_diff(level[v - 1]))
        .fold(0, gcd);
    // a strongly connected graph with at least one vertex has a cycle, so g > 0
    Some(g)
}

/// Searches for a nonempty proper `I` such that no entry has its head in `I`
/// and every tail index outside `I`. Returns the witness with the smallest
/// bitmask, or `None` if the tensor is irreducible.
pub fn is_reducible_tensor(t: &PatternTensor) -> Result<Option<IndexSet>> {
    let n = t.dim();
    if n > MAX_REDUCIBILITY_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: MAX_REDUCIBILITY_DIM,
        });
    }
    let slices = t.compress();
    let full = IndexSet::full(n).bits();
    for mask in 1..full {
        let set = IndexSet::from_bits(mask);
        let blocked = set
            .iter()
            .any(|u| slices.supports(u).iter().any(|s| s.is_disjoint(set)));
        if !blocked {
            return Ok(Some(set));
        }
    }
    Ok(None)
}

/// Least `k` with the boolean power `M^k` all true, by repeated
/// multiplication; `None` when `M^k` is not positive for any
/// `k <= (n-1)^2 + 1`, which rules out primitivity.
pub fn matrix_exponent(m: &BoolMatrix) -> Option<usize> {
    let n = m.dim();
    let cap = (n - 1) * (n - 1) + 1;
    let mut power = m.clone();
    for k in 1..=cap {
        if power.is_all_true() {
            return Some(k);
        }
        power = power.multiply(m);
    }
    None
}
