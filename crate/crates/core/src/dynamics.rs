//! Column reachability dynamics.
//!
//! For a tensor `A` and a column `j`, `S_k(A, j) = {u : (M(A^k))_{uj} > 0}`.
//! The sequence starts at column `j` of the majorization matrix and evolves by
//! `S_{k+1} = {u : some entry (u, i_2, ..., i_m) has every i_l in S_k}`.
//! `A` is j-primitive once some `S_k` is all of `[n]`; the least such `k` is
//! the j-primitive degree, and the primitive degree is the maximum over `j`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{digraph_of, exact_length_reach, reverse};
use crate::pattern::{check_index, BoolMatrix, CompressedSlices, IndexSet, PatternTensor};

/// How an S-sequence ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terminal {
    /// `S_k = [n]` for the first time at this `k`.
    ReachedFull {
        k: usize,
    },
    /// `S_{start + length} = S_start`; determinism means `[n]` never occurs.
    EnteredCycle {
        start: usize,
        length: usize,
    },
    HitLimit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SSequenceTrace {
    pub source: usize,
    /// `states[k - 1]` is `S_k`. On a cycle the repeated state is not pushed
    /// again, so the recorded states are pairwise distinct.
    pub states: Vec<IndexSet>,
    pub terminal: Terminal,
}

impl SSequenceTrace {
    /// `S_k`, if recorded.
    pub fn state(&self, k: usize) -> Option<IndexSet> {
        k.checked_sub(1).and_then(|i| self.states.get(i)).copied()
    }
}

/// Outcome of the j-primitive degree computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JDegree {
    Degree { value: usize },
    NotJPrimitive { cycle_start: usize, cycle_length: usize },
}

impl JDegree {
    pub fn value(self) -> Option<usize> {
        match self {
            JDegree::Degree { value } => Some(value),
            JDegree::NotJPrimitive { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    /// `per_j[j - 1]` is the outcome for column `j`.
    pub per_j: Vec<JDegree>,
    /// `None` when the tensor is not primitive.
    pub gamma: Option<usize>,
}

impl DegreeReport {
    pub fn is_primitive(&self) -> bool {
        self.gamma.is_some()
    }

    pub fn gamma_j(&self, j: usize) -> Option<usize> {
        self.per_j[j - 1].value()
    }

    pub fn j_primitive_set(&self) -> IndexSet {
        self.per_j
            .iter()
            .enumerate()
            .filter(|(_, d)| d.value().is_some())
            .fold(IndexSet::EMPTY, |acc, (i, _)| acc.with(i + 1))
    }
}

/// `S_1(T, j)`: column `j` of the majorization matrix.
pub fn s_initial(t: &PatternTensor, j: usize) -> Result<IndexSet> {
    t.check_index(j)?;
    Ok(t.majorization().column(j))
}

/// One step of the dynamics, from the compressed supports.
pub fn step(slices: &CompressedSlices, s: IndexSet) -> IndexSet {
    slices.step(s)
}

/// One step of the dynamics, evaluated tuple by tuple on the raw entries.
pub fn raw_step(t: &PatternTensor, s: IndexSet) -> IndexSet {
    let mut out = IndexSet::EMPTY;
    for e in t.entries() {
        if e[1..].iter().all(|&i| s.contains(i as usize)) {
            out.insert(e[0] as usize);
        }
    }
    out
}

/// Default sequence limit: one more than the number of distinct states.
pub fn default_limit(n: usize) -> usize {
    (1usize << n) + 1
}

/// Iterates the dynamics from column `j` until `[n]` is reached, a state
/// repeats, or `limit` states have been produced.
pub fn s_sequence(t: &PatternTensor, j: usize, limit: usize) -> Result<SSequenceTrace> {
    t.check_index(j)?;
    if limit < 1 {
        return Err(Error::BadLimit(format!("sequence limit {limit} < 1")));
    }
    Ok(run_sequence(&t.compress(), j, limit))
}

fn run_sequence(slices: &CompressedSlices, j: usize, limit: usize) -> SSequenceTrace {
    let full = IndexSet::full(slices.dim());
    let mut seen: HashMap<IndexSet, usize> = HashMap::new();
    let mut states = Vec::new();
    // S_0 = {j}: its only realizable tails are (j, ..., j)
    let mut current = IndexSet::singleton(j);
    let mut k = 0;
    let terminal = loop {
        if k == limit {
            break Terminal::HitLimit;
        }
        k += 1;
        current = slices.step(current);
        if let Some(&first) = seen.get(&current) {
            break Terminal::EnteredCycle {
                start: first,
                length: k - first,
            };
        }
        states.push(current);
        if current == full {
            break Terminal::ReachedFull { k };
        }
        seen.insert(current, k);
    };
    SSequenceTrace {
        source: j,
        states,
        terminal,
    }
}

fn degree_from_slices(slices: &CompressedSlices, j: usize) -> JDegree {
    let trace = run_sequence(slices, j, default_limit(slices.dim()));
    match trace.terminal {
        Terminal::ReachedFull { k } => JDegree::Degree { value: k },
        Terminal::EnteredCycle { start, length } => JDegree::NotJPrimitive {
            cycle_start: start,
            cycle_length: length,
        },
        Terminal::HitLimit => unreachable!("more states than subsets of [n]"),
    }
}

/// `γ_j(T)`, or the cycle that keeps the sequence away from `[n]`.
pub fn j_primitive_degree(t: &PatternTensor, j: usize) -> Result<JDegree> {
    t.check_index(j)?;
    Ok(degree_from_slices(&t.compress(), j))
}

/// Upper bound on the primitive degree of any primitive tensor of dimension `n`.
pub fn wielandt_bound(n: usize) -> usize {
    (n - 1) * (n - 1) + 1
}

/// Computes every `γ_j` and `γ = max_j γ_j` when all are finite.
///
/// Panics if a primitive tensor exceeds `(n-1)^2 + 1`: that bound is a
/// theorem, so exceeding it means the dynamics are wrong.
pub fn primitive_degree(t: &PatternTensor) -> DegreeReport {
    degrees_from_slices(&t.compress())
}

/// [`primitive_degree`] for already compressed supports.
pub fn degrees_from_slices(slices: &CompressedSlices) -> DegreeReport {
    let n = slices.dim();
    let per_j: Vec<JDegree> = (1..=n).map(|j| degree_from_slices(slices, j)).collect();
    let gamma = per_j
        .iter()
        .map(|d| d.value())
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().max().unwrap_or(0));
    if let Some(g) = gamma {
        assert!(
            g <= wielandt_bound(n),
            "primitive degree {g} exceeds (n-1)^2+1 = {} for {slices:?}",
            wielandt_bound(n)
        );
    }
    DegreeReport { per_j, gamma }
}

/// `{u : (M(A^k))_{uj} > 0}` via the boolean-semiring recurrence
/// `(M(A^{k+1}))_{uj} = OR over entries (u, i_2..i_m) of AND_l (M(A^k))_{i_l j}`,
/// evaluated on raw entry tuples.
pub fn majorization_power_column(t: &PatternTensor, j: usize, k: usize) -> Result<IndexSet> {
    t.check_index(j)?;
    if k < 1 {
        return Err(Error::BadLimit(format!("power {k} < 1")));
    }
    let mut column = IndexSet::EMPTY;
    for e in t.entries() {
        if e[1..].iter().all(|&i| i as usize == j) {
            column.insert(e[0] as usize);
        }
    }
    for _ in 1..k {
        column = raw_step(t, column);
    }
    Ok(column)
}

/// Vertices `u` with a walk of length `k` from `j` to `u` in the reversed
/// digraph of `M`; for a matrix this is `S_k(M, j)`.
pub fn walk_column(m: &BoolMatrix, j: usize, k: usize) -> Result<IndexSet> {
    check_index(j, m.dim())?;
    exact_length_reach(&reverse(&digraph_of(m)), j, k)
}
