//! Zero-nonzero patterns of nonnegative tensors.
//!
//! Indices are 1-based everywhere in the public API: a tensor of dimension
//! `n` has indices in `[n] = {1, ..., n}`. Primitivity depends only on which
//! entries are positive, so a [`PatternTensor`] stores the set of positive
//! positions and nothing else.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension. An [`IndexSet`] is a single `u32` mask.
pub const MAX_DIM: usize = 30;

/// A subset of `[n]`, stored as a bitmask with bit `i - 1` standing for `i`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    /// The full set `[n]`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_DIM);
        IndexSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&i));
        IndexSet(1 << (i - 1))
    }

    pub const fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(IndexSet::EMPTY, |acc, i| acc.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_DIM).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn with(self, i: usize) -> Self {
        IndexSet(self.0 | (1 << (i - 1)))
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << (i - 1);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: IndexSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: IndexSet) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSet) -> Self {
        IndexSet(self.0 & other.0)
    }

    /// `[n] \ self`.
    pub fn complement(self, n: usize) -> Self {
        IndexSet(!self.0 & IndexSet::full(n).0)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i + 1)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (pos, i) in self.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let members = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = members.iter().find(|&&i| i == 0 || i > MAX_DIM) {
            return Err(serde::de::Error::custom(format!("index {bad} out of range")));
        }
        Ok(IndexSet::from_indices(members))
    }
}

/// Square boolean matrix; `rows[i - 1]` holds the columns `j` with cell `(i, j)` set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    dim: usize,
    rows: Vec<IndexSet>,
}

impl BoolMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim, 1)?;
        Ok(BoolMatrix {
            dim,
            rows: vec![IndexSet::EMPTY; dim],
        })
    }

    pub fn ones(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        m.rows.fill(IndexSet::full(dim));
        Ok(m)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 1..=dim {
            m.rows[i - 1] = IndexSet::singleton(i);
        }
        Ok(m)
    }

    /// Builds a matrix from 1-based `(row, column)` cells.
    pub fn from_cells<I: IntoIterator<Item = (usize, usize)>>(dim: usize, cells: I) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for (i, j) in cells {
            m.set(i, j)?;
        }
        Ok(m)
    }

    pub fn from_rows(dim: usize, rows: Vec<IndexSet>) -> Result<Self> {
        check_dim(dim, 1)?;
        if rows.len() != dim {
            return Err(Error::BadShape(format!("{} rows for dimension {dim}", rows.len())));
        }
        let full = IndexSet::full(dim);
        if rows.iter().any(|r| !r.is_subset(full)) {
            return Err(Error::BadShape("row mask exceeds dimension".into()));
        }
        Ok(BoolMatrix { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, i: usize, j: usize) -> Result<()> {
        check_index(i, self.dim)?;
        check_index(j, self.dim)?;
        self.rows[i - 1].insert(j);
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= self.dim && self.rows[i - 1].contains(j)
    }

    pub fn row(&self, i: usize) -> IndexSet {
        self.rows[i - 1]
    }

    pub fn rows(&self) -> &[IndexSet] {
        &self.rows
    }

    /// `{i : cell (i, j) set}`.
    pub fn column(&self, j: usize) -> IndexSet {
        let mut col = IndexSet::EMPTY;
        for (i, row) in self.rows.iter().enumerate() {
            if row.contains(j) {
                col.insert(i + 1);
            }
        }
        col
    }

    pub fn transpose(&self) -> Self {
        let rows = (1..=self.dim).map(|j| self.column(j)).collect();
        BoolMatrix { dim: self.dim, rows }
    }

    /// Boolean product over the (OR, AND) semiring.
    pub fn multiply(&self, other: &BoolMatrix) -> BoolMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().fold(IndexSet::EMPTY, |acc, k| acc.union(other.rows[k - 1])))
            .collect();
        BoolMatrix { dim: self.dim, rows }
    }

    pub fn is_all_true(&self) -> bool {
        let full = IndexSet::full(self.dim);
        self.rows.iter().all(|&r| r == full)
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Set cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |j| (i + 1, j)))
    }

    /// The matrix as an order-2 pattern tensor.
    pub fn to_tensor(&self) -> PatternTensor {
        let entries = self.cells().map(|(i, j)| vec![i as u8, j as u8]).collect();
        PatternTensor {
            order: 2,
            dim: self.dim,
            entries,
        }
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix({})", self.dim)?;
        for row in &self.rows {
            for j in 1..=self.dim {
                f.write_str(if row.contains(j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Zero pattern of an order-`m`, dimension-`n` nonnegative tensor.
///
/// Each stored tuple `(i_1, ..., i_m)` (1-based) marks a positive entry.
/// Entries are kept in a sorted set, so equality and hashing are canonical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PatternTensor {
    order: usize,
    dim: usize,
    entries: BTreeSet<Vec<u8>>,
}

impl PatternTensor {
    /// Validates and deduplicates the given 1-based entry tuples.
    pub fn new<I, T>(order: usize, dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        check_shape(order, dim)?;
        let mut set = BTreeSet::new();
        for tuple in entries {
            let tuple = tuple.as_ref();
            if tuple.len() != order {
                return Err(Error::ArityMismatch {
                    expected: order,
                    found: tuple.len(),
                });
            }
            for &i in tuple {
                check_index(i, dim)?;
            }
            set.insert(tuple.iter().map(|&i| i as u8).collect());
        }
        Ok(PatternTensor {
            order,
            dim,
            entries: set,
        })
    }

    /// The all-zero pattern.
    pub fn zero(order: usize, dim: usize) -> Result<Self> {
        Self::new::<_, [usize; 0]>(order, dim, [])
    }

    /// The all-positive pattern.
    pub fn ones(order: usize, dim: usize) -> Result<Self> {
        check_shape(order, dim)?;
        Ok(PatternTensor {
            order,
            dim,
            entries: all_tuples(dim, order).collect(),
        })
    }

    /// Builds from already validated 1-based `u8` tuples.
    pub(crate) fn from_raw(order: usize, dim: usize, entries: BTreeSet<Vec<u8>>) -> Self {
        debug_assert!(entries
            .iter()
            .all(|t| t.len() == order && t.iter().all(|&i| i >= 1 && i as usize <= dim)));
        PatternTensor { order, dim, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries as 1-based `u8` tuples in sorted order.
    pub fn entries(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.entries.iter().map(|t| t.as_slice())
    }

    /// Entries as 1-based `usize` tuples in sorted order.
    pub fn entry_tuples(&self) -> Vec<Vec<usize>> {
        self.entries
            .iter()
            .map(|t| t.iter().map(|&i| i as usize).collect())
            .collect()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        tuple.len() == self.order
            && tuple.iter().all(|&i| i >= 1 && i <= self.dim)
            && self
                .entries
                .contains(&tuple.iter().map(|&i| i as u8).collect::<Vec<u8>>())
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        check_index(i, self.dim)
    }

    /// Majorization matrix: cell `(i, j)` is set iff `(i, j, ..., j)` is an entry.
    pub fn majorization(&self) -> BoolMatrix {
        let mut rows = vec![IndexSet::EMPTY; self.dim];
        for t in &self.entries {
            let j = t[1];
            if t[2..].iter().all(|&x| x == j) {
                rows[t[0] as usize - 1].insert(j as usize);
            }
        }
        BoolMatrix { dim: self.dim, rows }
    }

    /// Per-head deduplicated tail supports.
    pub fn compress(&self) -> CompressedSlices {
        let mut heads: Vec<BTreeSet<IndexSet>> = vec![BTreeSet::new(); self.dim];
        for t in &self.entries {
            let support = t[1..].iter().fold(IndexSet::EMPTY, |acc, &i| acc.with(i as usize));
            heads[t[0] as usize - 1].insert(support);
        }
        CompressedSlices {
            dim: self.dim,
            heads: heads.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    /// True iff some `i != j` has `(M(T))_{ij}` set. A `false` answer for any
    /// `j` rules out primitivity.
    pub fn column_nonzero_check(&self, j: usize) -> Result<bool> {
        check_index(j, self.dim)?;
        Ok(self.majorization().column(j).iter().any(|i| i != j))
    }

    /// Order-`m` tensor whose only entries are `(i, j, ..., j)` for set cells `(i, j)`.
    pub fn diagonal_embed(matrix: &BoolMatrix, order: usize) -> Result<Self> {
        check_shape(order, matrix.dim())?;
        let entries = matrix
            .cells()
            .map(|(i, j)| {
                let mut t = vec![j as u8; order];
                t[0] = i as u8;
                t
            })
            .collect();
        Ok(PatternTensor {
            order,
            dim: matrix.dim(),
            entries,
        })
    }

    /// Heads `u` with at least one entry `(u, ...)`.
    pub fn nonempty_heads(&self) -> IndexSet {
        self.entries
            .iter()
            .fold(IndexSet::EMPTY, |acc, t| acc.with(t[0] as usize))
    }

    /// For an order-2 pattern, the matrix it encodes.
    pub fn as_matrix(&self) -> Option<BoolMatrix> {
        (self.order == 2).then(|| self.majorization())
    }
}

impl fmt::Debug for PatternTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PatternTensor(order={}, dim={}, entries={:?})",
            self.order,
            self.dim,
            self.entry_tuples()
        )
    }
}

/// For each head `u`, the distinct supports `{i_2, ..., i_m}` of its entry tails.
///
/// Membership of every tail index in a set `S` depends only on the support,
/// so these are all the S-dynamics needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedSlices {
    dim: usize,
    heads: Vec<Vec<IndexSet>>,
}

impl CompressedSlices {
    /// Supports of an order-2 pattern: one singleton per set cell.
    pub fn from_matrix(m: &BoolMatrix) -> Self {
        CompressedSlices {
            dim: m.dim(),
            heads: m
                .rows()
                .iter()
                .map(|row| row.iter().map(IndexSet::singleton).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Supports for head `u` (1-based), sorted by mask.
    pub fn supports(&self, u: usize) -> &[IndexSet] {
        &self.heads[u - 1]
    }

    pub fn total_supports(&self) -> usize {
        self.heads.iter().map(Vec::len).sum()
    }

    /// `{u : some support of head u lies inside s}`.
    pub fn step(&self, s: IndexSet) -> IndexSet {
        let mut out = IndexSet::EMPTY;
        for (u, supports) in self.heads.iter().enumerate() {
            if supports.iter().any(|sup| sup.is_subset(s)) {
                out.insert(u + 1);
            }
        }
        out
    }
}

/// All tuples in `[n]^len`, 1-based, in lexicographic order.
pub fn all_tuples(n: usize, len: usize) -> impl Iterator<Item = Vec<u8>> {
    let mut next = if n == 0 && len > 0 { None } else { Some(vec![1u8; len]) };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut pos = len;
        while pos > 0 {
            pos -= 1;
            if (succ[pos] as usize) < n {
                succ[pos] += 1;
                next = Some(succ);
                break;
            }
            succ[pos] = 1;
        }
        Some(current)
    })
}

pub(crate) fn check_index(i: usize, dim: usize) -> Result<()> {
    if i == 0 || i > dim {
        Err(Error::IndexOutOfRange { index: i, dim })
    } else {
        Ok(())
    }
}

fn check_dim(dim: usize, min: usize) -> Result<()> {
    if dim < min {
        return Err(Error::BadShape(format!("dimension {dim} < {min}")));
    }
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
    }
    Ok(())
}

pub(crate) fn check_shape(order: usize, dim: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::BadShape(format!("order {order} < 2")));
    }
    check_dim(dim, 2)
}
