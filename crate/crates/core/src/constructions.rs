//! Named matrix and tensor families with known degrees.
//!
//! Residues are taken into `{1, ..., n}`: `|a|_n` is the least positive
//! integer congruent to `a` modulo `n`.

use std::collections::BTreeSet;

use crate::dynamics::{primitive_degree, wielandt_bound};
use crate::error::{Error, Result};
use crate::pattern::{all_tuples, check_shape, BoolMatrix, IndexSet, PatternTensor};

/// An index normalized into `[n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResidueIndex(usize);

impl ResidueIndex {
    pub fn new(a: i64, n: usize) -> Self {
        assert!(n >= 1);
        ResidueIndex((a - 1).rem_euclid(n as i64) as usize + 1)
    }

    pub fn get(self) -> usize {
        self.0
    }
}

fn residue(a: i64, n: usize) -> usize {
    ResidueIndex::new(a, n).get()
}

/// `k = (n-1) q + r` with `q >= 0` and `1 <= r <= n-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KDecomposition {
    pub k: usize,
    pub q: usize,
    pub r: usize,
}

impl KDecomposition {
    pub fn new(k: usize, n: usize) -> Self {
        assert!(k >= 1 && n >= 2);
        let q = (k - 1) / (n - 1);
        KDecomposition {
            k,
            q,
            r: k - (n - 1) * q,
        }
    }
}

/// Largest `k` for which the `A_k` family is defined: `n^2 - 3n + 2`.
pub fn max_ak_index(n: usize) -> usize {
    (n - 1) * (n - 2)
}

/// Cyclic run `{|a|_n, |a+1|_n, ..., |b|_n}` for `a <= b`.
pub fn residue_interval(a: i64, b: i64, n: usize) -> IndexSet {
    (a..=b).fold(IndexSet::EMPTY, |acc, x| acc.with(residue(x, n)))
}

/// The Wielandt pattern: ones at `(1, n-1)`, `(1, n)`, `(i, i-1)` for
/// `2 <= i <= n-1`, and `(n, n-1)`. For `n = 2` this is the full pattern
/// minus `(2, 2)`.
pub fn wielandt_matrix(n: usize) -> Result<BoolMatrix> {
    if n < 2 {
        return Err(Error::BadShape(format!("wielandt matrix needs n >= 2, got {n}")));
    }
    let mut cells = vec![(1, n - 1), (1, n), (n, n - 1)];
    cells.extend((2..n).map(|i| (i, i - 1)));
    BoolMatrix::from_cells(n, cells)
}

/// Diagonal embedding of the Wielandt pattern; primitive with degree `(n-1)^2 + 1`.
pub fn tensor_a0(m: usize, n: usize) -> Result<PatternTensor> {
    check_shape(m, n)?;
    PatternTensor::diagonal_embed(&wielandt_matrix(n)?, m)
}

/// `A_k`: the entries of `A_0`, plus `(i, tail)` for every head `i` outside
/// `{|r-q|_n, ..., |r+1|_n}` and every tail whose support is exactly
/// `{|r-q-1|_n, |r|_n}`, where `k = (n-1) q + r`. Primitive with degree `k + n`.
pub fn tensor_ak(m: usize, n: usize, k: usize) -> Result<PatternTensor> {
    if m < 3 {
        return Err(Error::BadShape(format!(
            "A_k needs order m >= 3 for a two-element tail support, got {m}"
        )));
    }
    if n < 3 {
        return Err(Error::BadShape(format!("A_k needs n >= 3, got {n}")));
    }
    check_shape(m, n)?;
    let max = max_ak_index(n);
    if k < 1 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    let KDecomposition { q, r, .. } = KDecomposition::new(k, n);
    let (q, r) = (q as i64, r as i64);
    let excluded = residue_interval(r - q, r + 1, n);
    let support = IndexSet::from_indices([residue(r - q - 1, n), residue(r, n)]);
    debug_assert_eq!(support.len(), 2);

    let mut entries: BTreeSet<Vec<u8>> = tensor_a0(m, n)?.entries().map(<[u8]>::to_vec).collect();
    let tails: Vec<Vec<u8>> = tails_with_support(n, m - 1, support).collect();
    for head in excluded.complement(n).iter() {
        for tail in &tails {
            let mut e = Vec::with_capacity(m);
            e.push(head as u8);
            e.extend_from_slice(tail);
            entries.insert(e);
        }
    }
    Ok(PatternTensor::from_raw(m, n, entries))
}

fn tails_with_support(n: usize, len: usize, support: IndexSet) -> impl Iterator<Item = Vec<u8>> {
    all_tuples(n, len).filter(move |t| t.iter().fold(IndexSet::EMPTY, |acc, &i| acc.with(i as usize)) == support)
}

/// A primitive matrix with exponent exactly `t` (`1 <= t <= n`): rows
/// `1..t-1` force the chain `i -> i+1`, rows `t..n` are full. The result is
/// checked against the dynamics before it is returned.
pub fn exponent_t_matrix(n: usize, t: usize) -> Result<BoolMatrix> {
    check_shape(2, n)?;
    if t < 1 || t > n {
        return Err(Error::TOutOfRange { t, max: n });
    }
    let rows = (1..=n)
        .map(|i| {
            if i < t {
                IndexSet::singleton(i + 1)
            } else {
                IndexSet::full(n)
            }
        })
        .collect();
    let m = BoolMatrix::from_rows(n, rows)?;
    let gamma = primitive_degree(&m.to_tensor()).gamma;
    if gamma != Some(t) {
        return Err(Error::SelfCheckFailed(format!(
            "exponent_t_matrix({n}, {t}) has exponent {gamma:?}"
        )));
    }
    Ok(m)
}

/// A primitive tensor with degree exactly `t`, for any `1 <= t <= (n-1)^2 + 1`.
pub fn tensor_bt(m: usize, n: usize, t: usize) -> Result<PatternTensor> {
    if m < 3 {
        return Err(Error::BadShape(format!("B_t needs order m >= 3, got {m}")));
    }
    check_shape(m, n)?;
    let max = wielandt_bound(n);
    if t < 1 || t > max {
        return Err(Error::TOutOfRange { t, max });
    }
    if t <= n {
        PatternTensor::diagonal_embed(&exponent_t_matrix(n, t)?, m)
    } else {
        tensor_ak(m, n, t - n)
    }
}

/// Ones at `(i, i+1)` for `1 <= i <= n-3`, `(n-2, 1)`, `(n-2, n-1)`,
/// `(n-1, 1)` and `(n, n-1)`. Not primitive; `γ_{n-1} = n^2 - 4n + 6`.
pub fn m2_matrix(n: usize) -> Result<BoolMatrix> {
    if n < 4 {
        return Err(Error::BadShape(format!("M_2 needs n >= 4, got {n}")));
    }
    let mut cells: Vec<_> = (1..=n - 3).map(|i| (i, i + 1)).collect();
    cells.extend([(n - 2, 1), (n - 2, n - 1), (n - 1, 1), (n, n - 1)]);
    BoolMatrix::from_cells(n, cells)
}

/// Size-`s` subsets of `from`, ordered lexicographically by sorted members.
pub fn subsets_lex(from: IndexSet, s: usize) -> Vec<IndexSet> {
    fn go(items: &[usize], s: usize, acc: IndexSet, out: &mut Vec<IndexSet>) {
        if s == 0 {
            out.push(acc);
            return;
        }
        for (pos, &x) in items.iter().enumerate() {
            if items.len() - pos < s {
                break;
            }
            go(&items[pos + 1..], s - 1, acc.with(x), out);
        }
    }
    let mut out = Vec::new();
    go(&from.to_vec(), s, IndexSet::EMPTY, &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Chain of same-size supports: with `S_1, ..., S_k` the subsets of
/// `{2, ..., n}` of size `floor((n-1)/2)` in lexicographic order, heads in
/// `S_1` see the tail `(1, ..., 1)`, heads in `S_{j+1}` see every tail with
/// support `S_j`, and every head sees every tail with support `S_k`.
///
/// 1-primitive with `γ_1 = k + 1`, and never primitive.
pub fn chain_tensor(m: usize, n: usize) -> Result<PatternTensor> {
    if n < 3 {
        return Err(Error::BadShape(format!("chain tensor needs n >= 3, got {n}")));
    }
    let s = (n - 1) / 2;
    if m < s + 1 {
        return Err(Error::OrderTooSmall { order: m, min: s + 1 });
    }
    check_shape(m, n)?;
    let chain = subsets_lex(IndexSet::singleton(1).complement(n), s);
    let mut entries = BTreeSet::new();
    let push = |entries: &mut BTreeSet<Vec<u8>>, heads: IndexSet, support: IndexSet| {
        for tail in tails_with_support(n, m - 1, support) {
            for h in heads.iter() {
                let mut e = Vec::with_capacity(m);
                e.push(h as u8);
                e.extend_from_slice(&tail);
                entries.insert(e);
            }
        }
    };
    push(&mut entries, chain[0], IndexSet::singleton(1));
    for pair in chain.windows(2) {
        push(&mut entries, pair[1], pair[0]);
    }
    push(
        &mut entries,
        IndexSet::full(n),
        *chain.last().expect("at least one subset"),
    );
    Ok(PatternTensor::from_raw(m, n, entries))
}

/// Order-`(m+1)` tensor with entry `(i_1, ..., i_m, i_m)` for each entry of `T`.
/// Preserves every `γ_j` and `γ`.
pub fn order_lift(t: &PatternTensor) -> PatternTensor {
    let entries = t
        .entries()
        .map(|e| {
            let mut lifted = e.to_vec();
            lifted.push(*e.last().expect("order >= 2"));
            lifted
        })
        .collect();
    PatternTensor::from_raw(t.order() + 1, t.dim(), entries)
}

/// The order-3, dimension-3 tensor that is positive everywhere except at
/// `(1,1,1)`, `(2,2,2)`, `(3,3,3)`, `(2,3,3)` and `(3,1,1)`. Its strongly
/// primitive degree is 4.
pub fn example_415() -> PatternTensor {
    const ZEROS: [[u8; 3]; 5] = [[1, 1, 1], [2, 2, 2], [3, 3, 3], [2, 3, 3], [3, 1, 1]];
    let entries = all_tuples(3, 3)
        .filter(|t| !ZEROS.iter().any(|z| z[..] == t[..]))
        .collect();
    PatternTensor::from_raw(3, 3, entries)
}
