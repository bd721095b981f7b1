//! Strongly primitive degree.
//!
//! The columns of `A^k` (tensor product powers) are the sets
//! `U_k(β) = {i : (A^k)_{iβ} > 0}`. Unrolling `A^k = A · A^{k-1}` shows that
//! every such set is `Ĝ(U_1, ..., U_{m-1})` for some choice of columns `U_l`
//! of `A^{k-1}`, where
//!
//! ```text
//! Ĝ(S_1, ..., S_{m-1}) = {u : some entry (u, i_2, ..., i_m) has i_{l+1} ∈ S_l for all l}
//! ```
//!
//! `Ĝ` is monotone in every argument, so only the minimal column sets matter
//! for deciding when every column is `[n]`. [`family_step`] iterates the
//! antichain of minimal sets; [`family_step_unpruned`] keeps every set and
//! serves as the reference.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::{all_tuples, check_index, IndexSet, PatternTensor};

/// Default generation cap for [`strongly_primitive_degree`].
pub const DEFAULT_CAP: usize = 512;

/// Largest dense tensor `direct_power` will materialize.
pub const DIRECT_POWER_MAX_CELLS: u128 = 100_000_000;

/// A family of index sets with its generation number. Sets are stored
/// sorted by bitmask, which is the canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    sets: Vec<IndexSet>,
    generation: usize,
}

impl SetFamily {
    /// Generation 0: the `n` singletons.
    pub fn singletons(n: usize) -> Self {
        SetFamily {
            sets: (1..=n).map(IndexSet::singleton).collect(),
            generation: 0,
        }
    }

    /// Minimal elements of `sets`.
    pub fn minimal<I: IntoIterator<Item = IndexSet>>(sets: I, generation: usize) -> Self {
        let mut by_size: Vec<IndexSet> = sets.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        by_size.sort_by_key(|s| (s.len(), s.bits()));
        let mut kept: Vec<IndexSet> = Vec::new();
        for s in by_size {
            if !kept.iter().any(|k| k.is_subset(s)) {
                kept.push(s);
            }
        }
        kept.sort();
        SetFamily { sets: kept, generation }
    }

    /// All distinct `sets`, without antichain reduction.
    pub fn distinct<I: IntoIterator<Item = IndexSet>>(sets: I, generation: usize) -> Self {
        SetFamily {
            sets: sets.into_iter().collect::<BTreeSet<_>>().into_iter().collect(),
            generation,
        }
    }

    pub fn sets(&self) -> &[IndexSet] {
        &self.sets
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// True iff the family is exactly `{[n]}`.
    pub fn is_full(&self, n: usize) -> bool {
        self.sets == [IndexSet::full(n)]
    }

    /// The minimal antichain of this family, same generation.
    pub fn antichain(&self) -> SetFamily {
        SetFamily::minimal(self.sets.iter().copied(), self.generation)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrongReport {
    StronglyPrimitive {
        eta: usize,
    },
    /// Some tail has no positive entry, which rules out strong primitivity.
    PrecheckFailed {
        tail: Vec<usize>,
    },
    /// The family state repeated without becoming `{[n]}`.
    FamilyCycle {
        start: usize,
        length: usize,
    },
    /// Inconclusive: the cap was reached first.
    CapExhausted {
        cap: usize,
    },
}

impl StrongReport {
    pub fn eta(&self) -> Option<usize> {
        match self {
            StrongReport::StronglyPrimitive { eta } => Some(*eta),
            _ => None,
        }
    }
}

/// `U(α) = {i : (i, α) is an entry}` for a tail `α` of length `m - 1`.
pub fn supplier_set(t: &PatternTensor, alpha: &[usize]) -> Result<IndexSet> {
    if alpha.len() + 1 != t.order() {
        return Err(Error::ArityMismatch {
            expected: t.order() - 1,
            found: alpha.len(),
        });
    }
    for &a in alpha {
        check_index(a, t.dim())?;
    }
    let mut out = IndexSet::EMPTY;
    for e in t.entries() {
        if e[1..].iter().zip(alpha).all(|(&x, &a)| x as usize == a) {
            out.insert(e[0] as usize);
        }
    }
    Ok(out)
}

/// Returns the first tail (lexicographically) with an empty supplier set.
pub fn precheck(t: &PatternTensor) -> Option<Vec<usize>> {
    let realized: BTreeSet<&[u8]> = t.entries().map(|e| &e[1..]).collect();
    all_tuples(t.dim(), t.order() - 1)
        .find(|tail| !realized.contains(tail.as_slice()))
        .map(|tail| tail.into_iter().map(usize::from).collect())
}

/// Entry positions indexed by tail slot and value, as bitsets over entries.
struct PositionalIndex {
    n: usize,
    words: usize,
    /// `by_slot[l][i - 1]`: entries whose tail slot `l` holds `i`.
    by_slot: Vec<Vec<Vec<u64>>>,
    /// `by_head[u - 1]`: entries with head `u`.
    by_head: Vec<Vec<u64>>,
}

impl PositionalIndex {
    fn new(t: &PatternTensor) -> Self {
        let n = t.dim();
        let arity = t.order() - 1;
        let words = t.len().div_ceil(64).max(1);
        let mut by_slot = vec![vec![vec![0u64; words]; n]; arity];
        let mut by_head = vec![vec![0u64; words]; n];
        for (idx, e) in t.entries().enumerate() {
            let (w, b) = (idx / 64, 1u64 << (idx % 64));
            by_head[e[0] as usize - 1][w] |= b;
            for (l, &i) in e[1..].iter().enumerate() {
                by_slot[l][i as usize - 1][w] |= b;
            }
        }
        PositionalIndex {
            n,
            words,
            by_slot,
            by_head,
        }
    }

    fn arity(&self) -> usize {
        self.by_slot.len()
    }

    /// Entries whose tail slot `l` lies in `s`.
    fn slot_mask(&self, l: usize, s: IndexSet) -> Vec<u64> {
        let mut out = vec![0u64; self.words];
        for i in s.iter() {
            for (o, w) in out.iter_mut().zip(&self.by_slot[l][i - 1]) {
                *o |= w;
            }
        }
        out
    }

    fn heads(&self, entries: &[u64]) -> IndexSet {
        let mut out = IndexSet::EMPTY;
        for u in 1..=self.n {
            if self.by_head[u - 1].iter().zip(entries).any(|(h, e)| h & e != 0) {
                out.insert(u);
            }
        }
        out
    }

    /// `Ĝ` of every tuple drawn from `family`, as a set of distinct results.
    fn image(&self, family: &[IndexSet]) -> BTreeSet<IndexSet> {
        let masks: Vec<Vec<Vec<u64>>> = (0..self.arity())
            .map(|l| family.iter().map(|&s| self.slot_mask(l, s)).collect())
            .collect();
        let mut out = BTreeSet::new();
        let mut prefix = vec![vec![u64::MAX; self.words]; self.arity() + 1];
        self.image_rec(&masks, 0, &mut prefix, &mut out);
        out
    }

    fn image_rec(
        &self,
        masks: &[Vec<Vec<u64>>],
        slot: usize,
        prefix: &mut Vec<Vec<u64>>,
        out: &mut BTreeSet<IndexSet>,
    ) {
        if slot == masks.len() {
            out.insert(self.heads(&prefix[slot]));
            return;
        }
        for m in &masks[slot] {
            let next: Vec<u64> = prefix[slot].iter().zip(m).map(|(a, b)| a & b).collect();
            prefix[slot + 1] = next;
            self.image_rec(masks, slot + 1, prefix, out);
        }
    }
}

/// `Ĝ(S_1, ..., S_{m-1})`; the position of each set matters.
pub fn g_step(t: &PatternTensor, sets: &[IndexSet]) -> Result<IndexSet> {
    if sets.len() + 1 != t.order() {
        return Err(Error::ArityMismatch {
            expected: t.order() - 1,
            found: sets.len(),
        });
    }
    let mut out = IndexSet::EMPTY;
    for e in t.entries() {
        if e[1..].iter().zip(sets).all(|(&i, s)| s.contains(i as usize)) {
            out.insert(e[0] as usize);
        }
    }
    Ok(out)
}

/// Next generation of minimal column sets.
pub fn family_step(t: &PatternTensor, family: &SetFamily) -> Result<SetFamily> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let index = PositionalIndex::new(t);
    Ok(step_with(&index, family))
}

fn step_with(index: &PositionalIndex, family: &SetFamily) -> SetFamily {
    SetFamily::minimal(index.image(&family.sets), family.generation + 1)
}

/// Next generation keeping every distinct column set.
pub fn family_step_unpruned(t: &PatternTensor, family: &SetFamily) -> Result<SetFamily> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let index = PositionalIndex::new(t);
    Ok(SetFamily::distinct(index.image(&family.sets), family.generation + 1))
}

/// `η(T)`: the least `k >= 1` such that `T^k` is entrywise positive.
pub fn strongly_primitive_degree(t: &PatternTensor, cap: usize) -> Result<StrongReport> {
    if cap < 1 {
        return Err(Error::BadLimit(format!("generation cap {cap} < 1")));
    }
    if let Some(tail) = precheck(t) {
        return Ok(StrongReport::PrecheckFailed { tail });
    }
    let n = t.dim();
    let index = PositionalIndex::new(t);
    let mut family = SetFamily::singletons(n);
    let mut seen: HashMap<Vec<IndexSet>, usize> = HashMap::new();
    for k in 1..=cap {
        family = step_with(&index, &family);
        if family.is_full(n) {
            return Ok(StrongReport::StronglyPrimitive { eta: k });
        }
        if let Some(&first) = seen.get(&family.sets) {
            return Ok(StrongReport::FamilyCycle {
                start: first,
                length: k - first,
            });
        }
        seen.insert(family.sets.clone(), k);
    }
    Ok(StrongReport::CapExhausted { cap })
}

/// Distinct column sets `{i : (i, β) is an entry}` over every tail `β`.
pub fn column_sets(t: &PatternTensor) -> BTreeSet<IndexSet> {
    let mut by_tail: HashMap<&[u8], IndexSet> = HashMap::new();
    for e in t.entries() {
        by_tail.entry(&e[1..]).or_default().insert(e[0] as usize);
    }
    let total = (t.dim() as u128).pow(t.order() as u32 - 1);
    let realized = by_tail.len() as u128;
    let mut out: BTreeSet<IndexSet> = by_tail.into_values().collect();
    if realized < total {
        out.insert(IndexSet::EMPTY);
    }
    out
}

/// Order of `A^k` for an order-`m` tensor: `(m-1)^k + 1`.
pub fn power_order(m: usize, k: usize) -> usize {
    (m - 1).pow(k as u32) + 1
}

/// Zero pattern of the tensor power `T^k`, evaluated literally from the
/// product `d_{i α_1 … α_{m-1}} = Σ a_{i i_2 … i_m} b_{i_2 α_1} ⋯ b_{i_m α_{m-1}}`
/// with `B = T^{k-1}`. Only for tiny inputs.
pub fn direct_power(t: &PatternTensor, k: usize) -> Result<PatternTensor> {
    if !(1..=3).contains(&k) {
        return Err(Error::BadLimit(format!("direct_power supports k in 1..=3, got {k}")));
    }
    let n = t.dim();
    let m = t.order();
    let target = power_order(m, k);
    let cells = (n as u128).checked_pow(target as u32);
    if cells.is_none_or(|c| c > DIRECT_POWER_MAX_CELLS) {
        return Err(Error::TooLarge(format!(
            "n^order = {n}^{target} exceeds {DIRECT_POWER_MAX_CELLS}"
        )));
    }
    let a = Dense::from_tensor(t);
    let mut power = a.clone();
    for _ in 1..k {
        power = a.product(&power);
    }
    Ok(power.to_tensor())
}

/// Dense row-major boolean tensor.
#[derive(Clone)]
struct Dense {
    order: usize,
    n: usize,
    cells: Vec<bool>,
}

impl Dense {
    fn from_tensor(t: &PatternTensor) -> Self {
        let n = t.dim();
        let mut cells = vec![false; n.pow(t.order() as u32)];
        for e in t.entries() {
            let idx = e.iter().fold(0, |acc, &i| acc * n + (i as usize - 1));
            cells[idx] = true;
        }
        Dense {
            order: t.order(),
            n,
            cells,
        }
    }

    /// `self · b` for `self` of order `m` and `b` of order `p`; the result
    /// has order `(m-1)(p-1) + 1`.
    fn product(&self, b: &Dense) -> Dense {
        let n = self.n;
        let slots = self.order - 1;
        let tail_b = b.order - 1;
        let block = n.pow(tail_b as u32);
        let order = slots * tail_b + 1;
        let tails_a = n.pow(slots as u32);
        let mut cells = vec![false; n.pow(order as u32)];
        let per_head = n.pow((order - 1) as u32);
        let mut inner = vec![0usize; slots];
        let mut alpha = vec![0usize; slots];
        for (idx, cell) in cells.iter_mut().enumerate() {
            let i = idx / per_head;
            // split the output tail into α_1, ..., α_{m-1}, most significant first
            let mut rest = idx % per_head;
            for l in (0..slots).rev() {
                alpha[l] = rest % block;
                rest /= block;
            }
            *cell = (0..tails_a).any(|tail| {
                let mut rest = tail;
                for l in (0..slots).rev() {
                    inner[l] = rest % n;
                    rest /= n;
                }
                self.cells[i * tails_a + tail] && inner.iter().zip(&alpha).all(|(&il, &al)| b.cells[il * block + al])
            });
        }
        Dense { order, n, cells }
    }

    fn to_tensor(&self) -> PatternTensor {
        let n = self.n;
        let entries = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(idx, _)| {
                let mut t = vec![0u8; self.order];
                let mut rest = idx;
                for slot in t.iter_mut().rev() {
                    *slot = (rest % n) as u8 + 1;
                    rest /= n;
                }
                t
            })
            .collect();
        PatternTensor::from_raw(self.order, n, entries)
    }
}

/// True iff every entry of the tensor is positive.
pub fn is_all_positive(t: &PatternTensor) -> bool {
    t.len() as u128 == (t.dim() as u128).pow(t.order() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{example_415, tensor_a0};
    use crate::dynamics::{primitive_degree, s_initial};
    use crate::pattern::BoolMatrix;
    use proptest::prelude::*;

    fn set(ix: &[usize]) -> IndexSet {
        IndexSet::from_indices(ix.iter().copied())
    }

    #[test]
    fn supplier_sets() {
        assert_eq!(supplier_set(&example_415(), &[1, 1]).unwrap(), set(&[2]));
        let ones = PatternTensor::ones(3, 3).unwrap();
        assert_eq!(supplier_set(&ones, &[2, 3]).unwrap(), IndexSet::full(3));
        assert!(supplier_set(&tensor_a0(3, 4).unwrap(), &[1, 2]).unwrap().is_empty());
        assert!(matches!(supplier_set(&ones, &[1]), Err(Error::ArityMismatch { .. })));
        assert!(supplier_set(&ones, &[1, 4]).is_err());
    }

    #[test]
    fn prechecks() {
        for n in 2..=5 {
            let tail = precheck(&tensor_a0(3, n).unwrap()).expect("mixed tails are zero");
            assert!(tail.iter().any(|&i| i != tail[0]));
        }
        assert_eq!(precheck(&example_415()), None);
        assert_eq!(precheck(&PatternTensor::ones(4, 2).unwrap()), None);
    }

    #[test]
    fn g_step_examples() {
        let t = example_415();
        for j in 1..=3 {
            assert_eq!(
                g_step(&t, &[IndexSet::singleton(j); 2]).unwrap(),
                s_initial(&t, j).unwrap()
            );
        }
        assert_eq!(g_step(&t, &[set(&[1]), set(&[1])]).unwrap(), set(&[2]));
        let a0 = tensor_a0(3, 4).unwrap();
        assert_eq!(g_step(&a0, &[IndexSet::full(4); 2]).unwrap(), a0.nonempty_heads());
        assert!(g_step(&a0, &[IndexSet::full(4)]).is_err());
    }

    #[test]
    fn family_steps() {
        let ones = PatternTensor::ones(3, 3).unwrap();
        let f1 = family_step(&ones, &SetFamily::singletons(3)).unwrap();
        assert!(f1.is_full(3));
        assert_eq!(f1.generation(), 1);
        let full = SetFamily::minimal([IndexSet::full(3)], 5);
        assert!(family_step(&ones, &full).unwrap().is_full(3));
        let empty = SetFamily::distinct([], 0);
        assert!(matches!(family_step(&ones, &empty), Err(Error::EmptyFamily)));
    }

    #[test]
    fn example_415_families() {
        let t = example_415();
        let mut f = SetFamily::singletons(3);
        let mut gens = vec![];
        for _ in 0..4 {
            f = family_step(&t, &f).unwrap();
            gens.push(f.clone());
        }
        let g2 = &gens[1];
        assert!(g2.sets().iter().any(|s| !s.contains(1)));
        assert!(g2.sets().iter().any(|s| !s.contains(3)));
        assert!(!gens[2].is_full(3));
        assert!(gens[3].is_full(3));
        assert_eq!(
            strongly_primitive_degree(&t, DEFAULT_CAP).unwrap(),
            StrongReport::StronglyPrimitive { eta: 4 }
        );
    }

    #[test]
    fn degree_verdicts() {
        for (m, n) in [(2, 3), (3, 3), (4, 2)] {
            let ones = PatternTensor::ones(m, n).unwrap();
            assert_eq!(strongly_primitive_degree(&ones, 8).unwrap().eta(), Some(1));
        }
        assert!(matches!(
            strongly_primitive_degree(&tensor_a0(3, 4).unwrap(), DEFAULT_CAP).unwrap(),
            StrongReport::PrecheckFailed { .. }
        ));
        assert!(strongly_primitive_degree(&example_415(), 0).is_err());
        assert_eq!(
            strongly_primitive_degree(&example_415(), 3).unwrap(),
            StrongReport::CapExhausted { cap: 3 }
        );
        // a permutation matrix: every column set is a singleton forever
        let perm = BoolMatrix::from_cells(3, [(1, 2), (2, 3), (3, 1)]).unwrap().to_tensor();
        assert!(matches!(
            strongly_primitive_degree(&perm, DEFAULT_CAP).unwrap(),
            StrongReport::FamilyCycle { .. }
        ));
    }

    #[test]
    fn direct_power_example_415() {
        let sq = direct_power(&example_415(), 2).unwrap();
        assert_eq!(sq.order(), 5);
        let zeros: Vec<Vec<u8>> = all_tuples(3, 5)
            .filter(|tup| !sq.contains(&tup.iter().map(|&i| i as usize).collect::<Vec<_>>()))
            .collect();
        assert_eq!(
            zeros,
            vec![vec![1, 3, 3, 3, 3], vec![2, 1, 1, 1, 1], vec![3, 3, 3, 3, 3]]
        );
    }

    #[test]
    fn direct_power_small_cases() {
        let ones = PatternTensor::ones(3, 2).unwrap();
        assert!(is_all_positive(&direct_power(&ones, 2).unwrap()));
        let id = PatternTensor::diagonal_embed(&BoolMatrix::identity(3).unwrap(), 3).unwrap();
        let sq = direct_power(&id, 2).unwrap();
        assert_eq!(sq.entry_tuples(), (1..=3).map(|i| vec![i; 5]).collect::<Vec<_>>());
        assert_eq!(direct_power(&id, 1).unwrap(), id);
        assert!(matches!(direct_power(&id, 4), Err(Error::BadLimit(_))));
        let big = PatternTensor::zero(4, 6).unwrap();
        assert!(matches!(direct_power(&big, 3), Err(Error::TooLarge(_))));
    }

    #[test]
    fn column_sets_include_empty_columns() {
        let a0 = tensor_a0(3, 3).unwrap();
        let cols = column_sets(&a0);
        assert!(cols.contains(&IndexSet::EMPTY));
        assert!(!column_sets(&PatternTensor::ones(3, 2).unwrap()).contains(&IndexSet::EMPTY));
    }

    fn arb_tensor() -> impl Strategy<Value = PatternTensor> {
        (2usize..=4, 2usize..=3).prop_flat_map(|(m, n)| {
            proptest::collection::vec(proptest::collection::vec(1..=n, m), 0..40)
                .prop_map(move |e| PatternTensor::new(m, n, e).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn g_step_monotone(t in arb_tensor(), raw in proptest::collection::vec((any::<u32>(), any::<u32>()), 3)) {
            let full = IndexSet::full(t.dim()).bits();
            let arity = t.order() - 1;
            let small: Vec<_> = raw[..arity].iter().map(|&(a, b)| IndexSet::from_bits(a & b & full)).collect();
            let big: Vec<_> = raw[..arity].iter().map(|&(a, _)| IndexSet::from_bits(a & full)).collect();
            prop_assert!(g_step(&t, &small).unwrap().is_subset(g_step(&t, &big).unwrap()));
        }

        #[test]
        fn pruning_is_sound(t in arb_tensor()) {
            let n = t.dim();
            let mut pruned = SetFamily::singletons(n);
            let mut full = SetFamily::singletons(n);
            for _ in 0..6 {
                pruned = family_step(&t, &pruned).unwrap();
                full = family_step_unpruned(&t, &full).unwrap();
                prop_assert_eq!(&full.antichain(), &pruned);
            }
        }

        #[test]
        fn strong_implies_primitive(t in arb_tensor()) {
            let report = strongly_primitive_degree(&t, 64).unwrap();
            if let Some(eta) = report.eta() {
                let gamma = primitive_degree(&t).gamma.expect("strongly primitive tensors are primitive");
                prop_assert!(eta >= gamma);
            }
            if precheck(&t).is_some() {
                prop_assert!(report.eta().is_none());
            }
        }

        #[test]
        fn first_generation_is_the_tensor_columns(t in arb_tensor()) {
            let f1 = family_step_unpruned(&t, &SetFamily::singletons(t.dim())).unwrap();
            prop_assert_eq!(f1.sets().to_vec(), column_sets(&t).into_iter().collect::<Vec<_>>());
        }
    }
}
