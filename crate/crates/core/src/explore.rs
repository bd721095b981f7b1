//! Exhaustive and sampled scans over zero patterns.
//!
//! Pattern streams are partitioned across rayon workers. Every accumulator
//! merge is commutative (counts add, witnesses keep the smallest stream
//! index), so reports are identical for any worker count.
//!
//! Findings about open questions are recorded as data. Only violations of
//! proven statements land in `violations`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::constructions::{m2_matrix, order_lift, tensor_bt};
use crate::dynamics::{degrees_from_slices, majorization_power_column, primitive_degree, wielandt_bound, DegreeReport};
use crate::error::{Error, Result};
use crate::graph::{is_reducible_tensor, matrix_exponent, MAX_REDUCIBILITY_DIM};
use crate::io::TensorJson;
use crate::pattern::{all_tuples, check_shape, BoolMatrix, CompressedSlices, IndexSet, PatternTensor};
use crate::strong::{strongly_primitive_degree, StrongReport};

/// Largest number of entry positions `n^m` for exhaustive enumeration.
pub const MAX_ENUMERATION_BITS: usize = 30;

/// Default inclusion probability for sampled patterns.
pub const DEFAULT_DENSITY: f64 = 0.15;

/// Counterexample candidates kept per report (smallest stream indices).
pub const MAX_COUNTEREXAMPLES: usize = 100;

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanMode {
    Exhaustive,
    Sampled { count: usize, seed: u64, density: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    pub mode: ScanMode,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

impl ScanConfig {
    pub fn exhaustive() -> Self {
        ScanConfig {
            mode: ScanMode::Exhaustive,
            workers: 0,
        }
    }

    pub fn sampled(count: usize, seed: u64, density: f64) -> Self {
        ScanConfig {
            mode: ScanMode::Sampled { count, seed, density },
            workers: 0,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

fn space_bits(m: usize, n: usize) -> Result<usize> {
    check_shape(m, n)?;
    let bits = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if bits > MAX_ENUMERATION_BITS as u128 {
        return Err(Error::SpaceTooLarge {
            bits: bits.min(usize::MAX as u128) as usize,
            max: MAX_ENUMERATION_BITS,
        });
    }
    Ok(bits as usize)
}

/// Number of patterns of order `m` and dimension `n`, if enumerable.
pub fn space_size(m: usize, n: usize) -> Result<u64> {
    Ok(1u64 << space_bits(m, n)?)
}

/// The pattern at position `index` of the canonical enumeration.
///
/// Entry positions are the tuples of `[n]^m` in lexicographic order; the
/// indicator string `b_0 b_1 ... b_{N-1}` has `b_p = 1` iff the `p`-th tuple is
/// an entry. Patterns are listed in lexicographic order of that string, so
/// `b_p` is bit `N - 1 - p` of `index`.
pub fn pattern_from_index(m: usize, n: usize, index: u64) -> PatternTensor {
    let bits = n.pow(m as u32);
    let entries = all_tuples(n, m)
        .enumerate()
        .filter(|(p, _)| index >> (bits - 1 - p) & 1 == 1)
        .map(|(_, t)| t)
        .collect();
    PatternTensor::from_raw(m, n, entries)
}

fn matrix_from_index(n: usize, index: u64) -> BoolMatrix {
    let bits = n * n;
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .filter(|j| index >> (bits - 1 - (i * n + j)) & 1 == 1)
                .fold(IndexSet::EMPTY, |acc, j| acc.with(j + 1))
        })
        .collect();
    BoolMatrix::from_rows(n, rows).expect("valid rows")
}

/// Every pattern of order `m` and dimension `n` exactly once, in canonical order.
pub fn enumerate_patterns(m: usize, n: usize) -> Result<impl Iterator<Item = PatternTensor>> {
    let total = space_size(m, n)?;
    Ok((0..total).map(move |i| pattern_from_index(m, n, i)))
}

/// `count` patterns from ChaCha8 seeded with `seed`. Each pattern visits the
/// entry positions in lexicographic order and keeps each one when a uniform
/// `f64` draw is below `density`.
pub fn sample_patterns(
    m: usize,
    n: usize,
    count: usize,
    seed: u64,
    density: f64,
) -> Result<impl Iterator<Item = PatternTensor>> {
    check_shape(m, n)?;
    if count < 1 {
        return Err(Error::BadLimit(format!("sample count {count} < 1")));
    }
    if !(density > 0.0 && density < 1.0) {
        return Err(Error::BadLimit(format!("density {density} not in (0, 1)")));
    }
    let positions: Vec<Vec<u8>> = all_tuples(n, m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(move |_| {
        let entries = positions
            .iter()
            .filter(|_| rng.gen::<f64>() < density)
            .cloned()
            .collect();
        PatternTensor::from_raw(m, n, entries)
    }))
}

/// Stable content hash: first 16 hex digits of SHA-256 over the pattern JSON.
pub fn pattern_id(t: &PatternTensor) -> String {
    let digest = Sha256::digest(crate::io::tensor_to_json(t).as_bytes());
    digest[..8].iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternClassification {
    pub id: String,
    pub order: usize,
    pub dim: usize,
    pub primitive: bool,
    pub gamma: Option<usize>,
    /// `gamma_j[j - 1]`, `None` when not j-primitive.
    pub gamma_j: Vec<Option<usize>>,
    pub irreducible: bool,
    pub reducibility_witness: Option<IndexSet>,
    pub eta: Option<StrongReport>,
}

impl PatternClassification {
    pub fn j_primitive(&self) -> IndexSet {
        self.gamma_j
            .iter()
            .enumerate()
            .filter(|(_, g)| g.is_some())
            .fold(IndexSet::EMPTY, |acc, (i, _)| acc.with(i + 1))
    }

    /// Whether the distinct `γ_j` values form a run of consecutive integers.
    /// Only meaningful for primitive tensors.
    pub fn gamma_j_is_interval(&self) -> Option<bool> {
        let values: BTreeSet<usize> = self.gamma_j.iter().copied().collect::<Option<_>>()?;
        let (lo, hi) = (*values.first()?, *values.last()?);
        Some(hi - lo + 1 == values.len())
    }
}

/// Degrees, reducibility and (optionally) the strongly primitive degree.
pub fn classify(t: &PatternTensor, with_strong: bool, cap: usize) -> Result<PatternClassification> {
    let mut c = classify_unnamed(t, with_strong, cap)?;
    c.id = pattern_id(t);
    Ok(c)
}

/// `classify` without the content hash, for scans.
fn classify_unnamed(t: &PatternTensor, with_strong: bool, cap: usize) -> Result<PatternClassification> {
    let degrees = primitive_degree(t);
    let witness = is_reducible_tensor(t)?;
    let eta = if with_strong {
        Some(strongly_primitive_degree(t, cap)?)
    } else {
        None
    };
    Ok(PatternClassification {
        id: String::new(),
        order: t.order(),
        dim: t.dim(),
        primitive: degrees.is_primitive(),
        gamma: degrees.gamma,
        gamma_j: degrees.per_j.iter().map(|d| d.value()).collect(),
        irreducible: witness.is_none(),
        reducibility_witness: witness,
        eta,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanParams {
    pub target: String,
    pub m: usize,
    pub n: usize,
    pub j: Option<usize>,
    pub mode: String,
    pub count: Option<usize>,
    pub density: Option<f64>,
    pub extra_patterns: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub bound: usize,
    pub observed: Option<usize>,
    pub holds: bool,
    /// Asserted checks are theorems; a failure is also listed as a violation.
    pub asserted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Position in the scanned stream.
    pub index: u64,
    pub tensor: TensorJson,
    pub primitive: bool,
    pub irreducible: bool,
    pub j_primitive: IndexSet,
    /// Both the power-recurrence oracle and (for matrices) the direct
    /// exponent agree with the dynamics on this tensor.
    pub reverified: bool,
}

impl PartialEq for TensorJson {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.dim == other.dim && self.entries == other.entries
    }
}

impl Eq for TensorJson {}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ScanResults {
    pub scanned: u64,
    /// Achieved degree -> number of patterns achieving it.
    pub achieved: BTreeMap<usize, u64>,
    pub max: Option<usize>,
    /// Maximal runs `[lo, hi]` below `max` with no achieved degree.
    pub gaps: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub union_over_j: Option<BTreeMap<usize, u64>>,
    pub stats: BTreeMap<String, u64>,
    pub bound_checks: Vec<BoundCheck>,
    pub counterexamples: Vec<Counterexample>,
    /// One witness pattern per achieved degree (smallest stream index).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub witnesses: BTreeMap<usize, TensorJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtlasReport {
    pub version: String,
    pub seed: Option<u64>,
    pub params: ScanParams,
    pub results: ScanResults,
    pub violations: Vec<String>,
}

impl AtlasReport {
    pub fn achieved_set(&self) -> BTreeSet<usize> {
        self.results.achieved.keys().copied().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// `degree,count` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,count\n");
        for (d, c) in &self.results.achieved {
            let _ = writeln!(out, "{d},{c}");
        }
        out
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let r = &self.results;
        let mut out = String::new();
        let _ = writeln!(out, "target     {}", p.target);
        let _ = writeln!(out, "order m    {}", p.m);
        let _ = writeln!(out, "dim n      {}", p.n);
        if let Some(j) = p.j {
            let _ = writeln!(out, "column j   {j}");
        }
        let _ = writeln!(out, "mode       {}", p.mode);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed       {seed}");
        }
        let _ = writeln!(out, "scanned    {}", r.scanned);
        let _ = writeln!(
            out,
            "max        {}",
            r.max.map_or_else(|| "-".to_string(), |m| m.to_string())
        );
        let gaps: Vec<String> = r.gaps.iter().map(|(a, b)| format!("[{a},{b}]")).collect();
        let _ = writeln!(
            out,
            "gaps       {}",
            if gaps.is_empty() { "none".into() } else { gaps.join(" ") }
        );
        let _ = writeln!(out, "\n{:>8}  {:>12}", "degree", "count");
        for (d, c) in &r.achieved {
            let _ = writeln!(out, "{d:>8}  {c:>12}");
        }
        if !r.stats.is_empty() {
            let _ = writeln!(out);
            for (k, v) in &r.stats {
                let _ = writeln!(out, "{k:<40} {v:>12}");
            }
        }
        if !r.bound_checks.is_empty() {
            let _ = writeln!(out);
            for b in &r.bound_checks {
                let observed = b.observed.map_or_else(|| "-".to_string(), |o| o.to_string());
                let _ = writeln!(
                    out,
                    "{:<40} bound {:>6}  observed {:>6}  {}{}",
                    b.name,
                    b.bound,
                    observed,
                    if b.holds { "ok" } else { "FAILS" },
                    if b.asserted { "" } else { " (reported)" }
                );
            }
        }
        let _ = writeln!(out, "\ncounterexample candidates: {}", r.counterexamples.len());
        let _ = writeln!(out, "violations: {}", self.violations.len());
        for v in &self.violations {
            let _ = writeln!(out, "  {v}");
        }
        out
    }
}

/// Sorted maximal runs in `[1, max)` missing from `achieved`.
pub fn gaps(achieved: &BTreeSet<usize>) -> Vec<(usize, usize)> {
    let Some(&max) = achieved.last() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut start = None;
    for d in 1..max {
        match (achieved.contains(&d), start) {
            (false, None) => start = Some(d),
            (true, Some(s)) => {
                out.push((s, d - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, max - 1));
    }
    out
}

/// Commutative scan state.
#[derive(Default)]
struct Tally {
    scanned: u64,
    achieved: BTreeMap<usize, u64>,
    union_over_j: BTreeMap<usize, u64>,
    stats: BTreeMap<String, u64>,
    witnesses: BTreeMap<usize, (u64, PatternTensor)>,
    counterexamples: BTreeMap<u64, PatternTensor>,
    violations: BTreeMap<u64, Vec<String>>,
}

impl Tally {
    fn bump(&mut self, key: &str) {
        *self.stats.entry(key.to_string()).or_default() += 1;
    }

    fn achieve(&mut self, degree: usize, index: u64, t: &PatternTensor) {
        *self.achieved.entry(degree).or_default() += 1;
        let slot = self.witnesses.entry(degree).or_insert_with(|| (index, t.clone()));
        if index < slot.0 {
            *slot = (index, t.clone());
        }
    }

    fn violation(&mut self, index: u64, msg: String) {
        self.violations.entry(index).or_default().push(msg);
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.scanned += other.scanned;
        for (d, c) in other.achieved {
            *self.achieved.entry(d).or_default() += c;
        }
        for (d, c) in other.union_over_j {
            *self.union_over_j.entry(d).or_default() += c;
        }
        for (k, v) in other.stats {
            *self.stats.entry(k).or_default() += v;
        }
        for (d, (i, t)) in other.witnesses {
            match self.witnesses.get(&d) {
                Some((j, _)) if *j <= i => {}
                _ => {
                    self.witnesses.insert(d, (i, t));
                }
            }
        }
        self.counterexamples.extend(other.counterexamples);
        while self.counterexamples.len() > MAX_COUNTEREXAMPLES {
            self.counterexamples.pop_last();
        }
        for (i, v) in other.violations {
            self.violations.entry(i).or_default().extend(v);
        }
        self
    }
}

/// The patterns a scan visits, each tagged with its stream index.
enum Stream {
    Exhaustive { m: usize, n: usize, total: u64 },
    Listed(Vec<PatternTensor>),
}

impl Stream {
    fn build(m: usize, n: usize, mode: ScanMode) -> Result<Stream> {
        match mode {
            ScanMode::Exhaustive => Ok(Stream::Exhaustive {
                m,
                n,
                total: space_size(m, n)?,
            }),
            ScanMode::Sampled { count, seed, density } => {
                Ok(Stream::Listed(sample_patterns(m, n, count, seed, density)?.collect()))
            }
        }
    }

    fn push_extras(self, extras: &[PatternTensor]) -> Stream {
        if extras.is_empty() {
            return self;
        }
        let mut listed = match self {
            Stream::Exhaustive { m, n, total } => (0..total).map(|i| pattern_from_index(m, n, i)).collect(),
            Stream::Listed(v) => v,
        };
        listed.extend(extras.iter().cloned());
        Stream::Listed(listed)
    }

    fn fold<F>(&self, workers: usize, visit: F) -> Result<Tally>
    where
        F: Fn(&mut Tally, u64, &PatternTensor) + Sync + Send,
    {
        let run = || match self {
            Stream::Exhaustive { m, n, total } => (0..*total)
                .into_par_iter()
                .fold(Tally::default, |mut acc, i| {
                    let t = pattern_from_index(*m, *n, i);
                    acc.scanned += 1;
                    visit(&mut acc, i, &t);
                    acc
                })
                .reduce(Tally::default, Tally::merge),
            Stream::Listed(v) => v
                .par_iter()
                .enumerate()
                .fold(Tally::default, |mut acc, (i, t)| {
                    acc.scanned += 1;
                    visit(&mut acc, i as u64, t);
                    acc
                })
                .reduce(Tally::default, Tally::merge),
        };
        if workers == 0 {
            Ok(run())
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::BadLimit(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

fn params(
    target: &str,
    m: usize,
    n: usize,
    j: Option<usize>,
    mode: ScanMode,
    extras: usize,
) -> (ScanParams, Option<u64>) {
    let (mode_name, count, density, seed) = match mode {
        ScanMode::Exhaustive => ("exhaustive", None, None, None),
        ScanMode::Sampled { count, seed, density } => ("sampled", Some(count), Some(density), Some(seed)),
    };
    (
        ScanParams {
            target: target.to_string(),
            m,
            n,
            j,
            mode: mode_name.to_string(),
            count,
            density,
            extra_patterns: extras,
        },
        seed,
    )
}

fn check_reducibility_dim(n: usize) -> Result<()> {
    if n > MAX_REDUCIBILITY_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: MAX_REDUCIBILITY_DIM,
        });
    }
    Ok(())
}

/// Checks that hold for every pattern: primitive tensors are irreducible,
/// obey the Wielandt bound, and every finite `γ_j` is at most `2^n - 1`.
fn soundness(acc: &mut Tally, index: u64, t: &PatternTensor, c: &PatternClassification) {
    let n = t.dim();
    if c.primitive {
        if !c.irreducible {
            acc.violation(
                index,
                format!("primitive but reducible: {}", crate::io::tensor_to_json(t)),
            );
        }
        if c.gamma.is_some_and(|g| g > wielandt_bound(n)) {
            acc.violation(
                index,
                format!("gamma above (n-1)^2+1: {}", crate::io::tensor_to_json(t)),
            );
        }
    }
    if c.gamma_j.iter().flatten().any(|&g| g as u64 > (1u64 << n) - 1) {
        acc.violation(index, format!("gamma_j above 2^n-1: {}", crate::io::tensor_to_json(t)));
    }
}

fn finish(
    params: ScanParams,
    seed: Option<u64>,
    tally: Tally,
    bound_checks: Vec<BoundCheck>,
    counterexamples: Vec<Counterexample>,
    union: bool,
) -> AtlasReport {
    let achieved_set: BTreeSet<usize> = tally.achieved.keys().copied().collect();
    let mut violations: Vec<String> = tally
        .violations
        .into_iter()
        .flat_map(|(i, v)| v.into_iter().map(move |s| format!("#{i}: {s}")))
        .collect();
    violations.extend(bound_checks.iter().filter(|b| b.asserted && !b.holds).map(|b| {
        format!(
            "bound check failed: {} (bound {}, observed {:?})",
            b.name, b.bound, b.observed
        )
    }));
    AtlasReport {
        version: REPORT_VERSION.to_string(),
        seed,
        params,
        results: ScanResults {
            scanned: tally.scanned,
            max: achieved_set.last().copied(),
            gaps: gaps(&achieved_set),
            achieved: tally.achieved,
            union_over_j: union.then_some(tally.union_over_j),
            stats: tally.stats,
            bound_checks,
            counterexamples,
            witnesses: tally
                .witnesses
                .into_iter()
                .map(|(d, (_, t))| (d, TensorJson::from(&t)))
                .collect(),
        },
        violations,
    }
}

/// Recomputes j-primitivity and primitivity with the power-recurrence oracle
/// (and, for matrices, the direct boolean exponent) and compares with `c`.
fn reverify(t: &PatternTensor, c: &PatternClassification) -> bool {
    let n = t.dim();
    let full = IndexSet::full(n);
    let horizon = 1usize << n;
    let oracle_j: IndexSet = (1..=n)
        .filter(|&j| (1..=horizon).any(|k| majorization_power_column(t, j, k).expect("valid j") == full))
        .fold(IndexSet::EMPTY, IndexSet::with);
    let mut ok = oracle_j == c.j_primitive() && (oracle_j == full) == c.primitive;
    if let Some(m) = t.as_matrix() {
        ok &= matrix_exponent(&m).is_some() == c.primitive;
    }
    ok
}

fn counterexample(index: u64, t: &PatternTensor) -> Counterexample {
    let c = classify(t, false, 1).expect("dimension validated");
    Counterexample {
        index,
        tensor: TensorJson::from(t),
        primitive: c.primitive,
        irreducible: c.irreducible,
        j_primitive: c.j_primitive(),
        reverified: reverify(t, &c),
    }
}

/// Re-classifies replayed counterexample candidates.
pub fn replay(tensors: &[PatternTensor]) -> Result<Vec<Counterexample>> {
    for t in tensors {
        check_reducibility_dim(t.dim())?;
    }
    Ok(tensors
        .iter()
        .enumerate()
        .map(|(i, t)| counterexample(i as u64, t))
        .collect())
}

/// Compares primitivity with "irreducible and j-primitive for some j".
///
/// The forward direction is a theorem and is enforced; patterns that are
/// irreducible and j-primitive for some `j` but not primitive are collected
/// as candidates, re-verified, and reported. The achieved set is the
/// multiset of `γ` over primitive patterns.
pub fn conjecture45_scan(m: usize, n: usize, config: &ScanConfig) -> Result<AtlasReport> {
    check_reducibility_dim(n)?;
    let stream = Stream::build(m, n, config.mode)?;
    let tally = stream.fold(config.workers, |acc, i, t| {
        let c = classify_unnamed(t, false, 1).expect("dimension validated");
        soundness(acc, i, t, &c);
        let some_j = !c.j_primitive().is_empty();
        if c.primitive {
            acc.bump("primitive");
            acc.achieve(c.gamma.expect("primitive"), i, t);
            match c.gamma_j_is_interval() {
                Some(true) => acc.bump("primitive_gamma_j_interval"),
                _ => acc.bump("primitive_gamma_j_not_interval"),
            }
        }
        if c.irreducible {
            acc.bump("irreducible");
        }
        if some_j {
            acc.bump("j_primitive_for_some_j");
        }
        if c.irreducible && some_j {
            acc.bump("irreducible_and_j_primitive");
            if !c.primitive {
                acc.bump("reverse_discrepancies");
                acc.counterexamples.insert(i, t.clone());
            }
        }
        if c.primitive && !(c.irreducible && some_j) {
            acc.bump("forward_failures");
            acc.violation(i, "primitive without irreducible and j-primitive".into());
        }
    })?;
    let counterexamples = tally
        .counterexamples
        .iter()
        .map(|(&i, t)| counterexample(i, t))
        .collect();
    let (p, seed) = params("conjecture45", m, n, None, config.mode, 0);
    Ok(finish(p, seed, tally, Vec::new(), counterexamples, false))
}

/// Builds `B_t` for every `t` in `[1, (n-1)^2 + 1]` and checks `γ(B_t) = t`.
pub fn exponent_scan(m: usize, n: usize) -> Result<AtlasReport> {
    let max = wielandt_bound(n);
    let mut tally = Tally::default();
    for t in 1..=max {
        let b = tensor_bt(m, n, t)?;
        let gamma = primitive_degree(&b).gamma;
        tally.scanned += 1;
        if let Some(g) = gamma {
            tally.achieve(g, t as u64, &b);
        }
        if gamma != Some(t) {
            tally.violation(t as u64, format!("gamma(B_{t}) = {gamma:?}, expected {t}"));
        }
    }
    let achieved: BTreeSet<usize> = tally.achieved.keys().copied().collect();
    let checks = vec![BoundCheck {
        name: "achieved set equals [1, (n-1)^2+1]".into(),
        bound: max,
        observed: achieved.last().copied(),
        holds: achieved == (1..=max).collect(),
        asserted: true,
    }];
    let (p, _) = params("exponent-atlas", m, n, None, ScanMode::Exhaustive, 0);
    Ok(finish(p, None, tally, checks, Vec::new(), false))
}

/// `r(2, n) = n^2 - 4n + 6` for `n >= 2`.
pub fn r2_formula(n: usize) -> usize {
    n * n + 6 - 4 * n
}

/// Collects `γ_j` over patterns that are j-primitive but not primitive.
///
/// `extras` are appended after the main stream. The achieved set is `R_j`;
/// the union over all `j` is reported alongside. Every achieved degree's
/// witness is lifted one order up and must keep its `γ_j` and stay
/// non-primitive.
pub fn rj_scan(m: usize, n: usize, j: usize, config: &ScanConfig, extras: &[PatternTensor]) -> Result<AtlasReport> {
    check_reducibility_dim(n)?;
    crate::pattern::check_index(j, n)?;
    if let Some(bad) = extras.iter().find(|t| t.order() != m || t.dim() != n) {
        return Err(Error::BadShape(format!(
            "extra pattern has order {} and dim {}, scan is ({m}, {n})",
            bad.order(),
            bad.dim()
        )));
    }
    let stream = Stream::build(m, n, config.mode)?.push_extras(extras);
    let tally = stream.fold(config.workers, |acc, i, t| {
        let d = primitive_degree(t);
        if d.is_primitive() {
            return;
        }
        acc.bump("not_primitive");
        for (jj, g) in d.per_j.iter().enumerate() {
            if let Some(g) = g.value() {
                *acc.union_over_j.entry(g).or_default() += 1;
                if jj + 1 == j {
                    acc.achieve(g, i, t);
                }
                if g as u64 > (1u64 << n) - 1 {
                    acc.violation(i, format!("gamma_{} = {g} above 2^n-1", jj + 1));
                }
            }
        }
    })?;
    let max = tally.achieved.keys().last().copied();
    let union_max = tally.union_over_j.keys().last().copied();
    let mut checks = vec![BoundCheck {
        name: "R_j max <= 2^n - 1".into(),
        bound: (1usize << n) - 1,
        observed: max,
        holds: max.is_none_or(|x| x < 1 << n),
        asserted: true,
    }];
    if m == 2 {
        checks.push(BoundCheck {
            name: "union max <= n^2 - 4n + 6".into(),
            bound: r2_formula(n),
            observed: union_max,
            holds: union_max.is_none_or(|x| x <= r2_formula(n)),
            asserted: true,
        });
    }
    let lift_ok = tally.witnesses.iter().all(|(&g, (_, t))| {
        let lifted = primitive_degree(&order_lift(t));
        !lifted.is_primitive() && lifted.gamma_j(j) == Some(g)
    });
    checks.push(BoundCheck {
        name: "witnesses lift to order m+1".into(),
        bound: tally.witnesses.len(),
        observed: Some(tally.witnesses.len()),
        holds: lift_ok,
        asserted: true,
    });
    let (p, seed) = params("rj", m, n, Some(j), config.mode, extras.len());
    Ok(finish(p, seed, tally, checks, Vec::new(), true))
}

/// Exhaustive maximum of `γ_j` over every non-primitive matrix of order `n`
/// and every `j`; for `n >= 4` it must equal `n^2 - 4n + 6`.
pub fn r2_exhaustive(n: usize, workers: usize) -> Result<AtlasReport> {
    let total = space_size(2, n)?;
    if n > 5 {
        return Err(Error::SpaceTooLarge { bits: n * n, max: 25 });
    }
    let run = || {
        (0..total)
            .into_par_iter()
            .fold(Tally::default, |mut acc, i| {
                acc.scanned += 1;
                let m = matrix_from_index(n, i);
                let d: DegreeReport = degrees_from_slices(&CompressedSlices::from_matrix(&m));
                if d.is_primitive() {
                    return acc;
                }
                let best = d.per_j.iter().filter_map(|g| g.value()).max();
                for g in d.per_j.iter().filter_map(|g| g.value()) {
                    *acc.union_over_j.entry(g).or_default() += 1;
                }
                if let Some(g) = best {
                    acc.achieve(g, i, &m.to_tensor());
                }
                acc
            })
            .reduce(Tally::default, Tally::merge)
    };
    let tally = if workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::BadLimit(format!("thread pool: {e}")))?
            .install(run)
    };
    let max = tally.achieved.keys().last().copied();
    let formula = r2_formula(n);
    let mut checks = vec![BoundCheck {
        name: "max equals n^2 - 4n + 6".into(),
        bound: formula,
        observed: max,
        holds: max == Some(formula),
        asserted: n >= 4,
    }];
    if n >= 4 {
        let m2 = primitive_degree(&m2_matrix(n)?.to_tensor());
        checks.push(BoundCheck {
            name: "M_2 attains the max at j = n-1".into(),
            bound: formula,
            observed: m2.gamma_j(n - 1),
            holds: !m2.is_primitive() && m2.gamma_j(n - 1) == max,
            asserted: true,
        });
    }
    let (p, _) = params("r2", 2, n, None, ScanMode::Exhaustive, 0);
    Ok(finish(p, None, tally, checks, Vec::new(), false))
}
