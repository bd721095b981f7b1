//! Property suites over the construction families and the oracles.
//!
//! Each suite checks published closed forms over ranges of `(m, n)` and
//! lists every mismatch with its exact parameters.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::Serialize;

use crate::constructions::{
    binomial, chain_tensor, m2_matrix, max_ak_index, order_lift, residue_interval, tensor_a0, tensor_ak, tensor_bt,
    KDecomposition,
};
use crate::dynamics::{
    majorization_power_column, primitive_degree, s_initial, s_sequence, step, walk_column, wielandt_bound,
};
use crate::error::{Error, Result};
use crate::explore::sample_patterns;
use crate::pattern::{IndexSet, PatternTensor};
use crate::strong::{direct_power, family_step, family_step_unpruned, is_all_positive, SetFamily};

/// Densities cycled through by the random suites.
const DENSITIES: [f64; 4] = [0.1, 0.2, 0.35, 0.5];

/// Generations compared between pruned and unpruned families.
const FAMILY_GENERATIONS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    A0,
    Ak,
    ExponentSet,
    M2,
    Chain,
    Lift,
    Oracles,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::A0,
        Suite::Ak,
        Suite::ExponentSet,
        Suite::M2,
        Suite::Chain,
        Suite::Lift,
        Suite::Oracles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::A0 => "a0",
            Suite::Ak => "ak",
            Suite::ExponentSet => "exponent-set",
            Suite::M2 => "m2",
            Suite::Chain => "chain",
            Suite::Lift => "lift",
            Suite::Oracles => "oracles",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::BadArgument(format!("unknown suite {s:?}")))
    }
}

/// Parses `a..b`, `a..=b` or a single value `a` as an inclusive range.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::BadArgument(format!("bad range {s:?}"));
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub suite: Suite,
    pub m: usize,
    pub n: usize,
    pub k: Option<usize>,
    pub j: Option<usize>,
    pub what: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] m={} n={}", self.suite, self.m, self.n)?;
        if let Some(k) = self.k {
            write!(f, " k={k}")?;
        }
        if let Some(j) = self.j {
            write!(f, " j={j}")?;
        }
        write!(f, ": {} expected {} got {}", self.what, self.expected, self.actual)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Option<Suite>,
    pub checks: usize,
    /// Parameter tuples outside a family's domain.
    pub skipped: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport {
            suite: Some(suite),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check<T: PartialEq + fmt::Debug>(
        &mut self,
        (m, n, k, j): (usize, usize, Option<usize>, Option<usize>),
        what: &str,
        expected: T,
        actual: T,
    ) {
        self.checks += 1;
        if expected != actual {
            self.failures.push(Failure {
                suite: self.suite.expect("suite report"),
                m,
                n,
                k,
                j,
                what: what.to_string(),
                expected: format!("{expected:?}"),
                actual: format!("{actual:?}"),
            });
        }
    }

    fn error(&mut self, at: (usize, usize, Option<usize>, Option<usize>), what: &str, e: Error) {
        self.check(at, what, "Ok".to_string(), e.to_string());
    }
}

/// Parameters for the random suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleParams {
    pub count: usize,
    pub seed: u64,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams { count: 500, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub m: RangeInclusive<usize>,
    pub n: RangeInclusive<usize>,
    pub samples: SampleParams,
}

impl VerifyConfig {
    /// Default ranges for each suite.
    pub fn default_for(suite: Suite) -> Self {
        let (m, n) = match suite {
            Suite::A0 => (3..=4, 3..=7),
            Suite::Ak => (3..=4, 4..=6),
            Suite::ExponentSet => (3..=4, 4..=5),
            Suite::M2 => (2..=2, 5..=7),
            Suite::Chain => (3..=4, 5..=7),
            Suite::Lift => (3..=3, 2..=5),
            Suite::Oracles => (2..=4, 2..=4),
        };
        VerifyConfig {
            m,
            n,
            samples: SampleParams::default(),
        }
    }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> SuiteReport {
    match suite {
        Suite::A0 => a0_suite(config),
        Suite::Ak => ak_suite(config),
        Suite::ExponentSet => exponent_set_suite(config),
        Suite::M2 => m2_suite(config),
        Suite::Chain => chain_suite(config),
        Suite::Lift => lift_suite(config),
        Suite::Oracles => oracle_suite(config),
    }
}

/// `γ(A_0) = (n-1)^2+1`, `γ_{n-1}(A_0) = n^2-3n+3`, and the closed form
/// `S_k(A_0, n-1) = {|r-q-1|_n, ..., |r|_n}` with `q+2` pairwise distinct
/// states for `k <= n^2-3n+2`.
pub fn a0_suite(config: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::A0);
    for m in config.m.clone() {
        for n in config.n.clone() {
            let t = match tensor_a0(m, n) {
                Ok(t) => t,
                Err(_) => {
                    rep.skipped += 1;
                    continue;
                }
            };
            let d = primitive_degree(&t);
            rep.check((m, n, None, None), "gamma", Some(wielandt_bound(n)), d.gamma);
            rep.check(
                (m, n, None, Some(n - 1)),
                "gamma_j",
                Some(n * n + 3 - 3 * n),
                d.gamma_j(n - 1),
            );
            let last = max_ak_index(n);
            let trace = match s_sequence(&t, n - 1, last) {
                Ok(tr) => tr,
                Err(e) => {
                    rep.error((m, n, None, Some(n - 1)), "s_sequence", e);
                    continue;
                }
            };
            for k in 1..=last {
                let KDecomposition { q, r, .. } = KDecomposition::new(k, n);
                let expected = residue_interval(r as i64 - q as i64 - 1, r as i64, n);
                let at = (m, n, Some(k), Some(n - 1));
                rep.check(at, "S_k", Some(expected), trace.state(k));
                rep.check(at, "|S_k|", q + 2, trace.state(k).map_or(0, IndexSet::len));
            }
            let distinct: BTreeSet<IndexSet> = trace.states.iter().copied().collect();
            rep.check(
                (m, n, None, Some(n - 1)),
                "distinct states",
                last,
                distinct.len().min(last),
            );
            rep.check(
                (m, n, Some(last), Some(n - 1)),
                "final state",
                Some(IndexSet::full(n - 1)),
                trace.state(last),
            );
        }
    }
    rep
}

/// `γ_j(A_k) = k+n-j` for `j in 0..n` (`j = 0` is index `n`) and
/// `γ(A_k) = k+n`.
pub fn ak_suite(config: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::Ak);
    for m in config.m.clone() {
        for n in config.n.clone() {
            if m < 3 || n < 3 {
                rep.skipped += 1;
                continue;
            }
            for k in 1..=max_ak_index(n) {
                let t = match tensor_ak(m, n, k) {
                    Ok(t) => t,
                    Err(e) => {
                        rep.error((m, n, Some(k), None), "tensor_ak", e);
                        continue;
                    }
                };
                let d = primitive_degree(&t);
                rep.check((m, n, Some(k), None), "gamma", Some(k + n), d.gamma);
                for j in 0..n {
                    let index = if j == 0 { n } else { j };
                    rep.check((m, n, Some(k), Some(j)), "gamma_j", Some(k + n - j), d.gamma_j(index));
                }
            }
        }
    }
    rep
}

/// `γ(B_t) = t` for every `t` in `[1, (n-1)^2+1]`.
pub fn exponent_set_suite(config: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::ExponentSet);
    for m in config.m.clone() {
        for n in config.n.clone() {
            if m < 3 {
                rep.skipped += 1;
                continue;
            }
            for t in 1..=wielandt_bound(n) {
                match tensor_bt(m, n, t) {
                    Ok(b) => rep.check((m, n, Some(t), None), "gamma(B_t)", Some(t), primitive_degree(&b).gamma),
                    Err(e) => rep.error((m, n, Some(t), None), "tensor_bt", e),
                }
            }
        }
    }
    rep
}

/// `M_2(n)` is not primitive and `γ_{n-1}(M_2) = n^2-4n+6`. The order
/// range is ignored.
pub fn m2_suite(config: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::M2);
    for n in config.n.clone() {
        let t = match m2_matrix(n) {
            Ok(m) => m.to_tensor(),
            Err(_) => {
                rep.skipped += 1;
                continue;
            }
        };
        let d = primitive_degree(&t);
        rep.check((2, n, None, None), "primitive", false, d.is_primitive());
        rep.check(
            (2, n, None, Some(n - 1)),
            "gamma_j",
            Some(n * n + 6 - 4 * n),
            d.gamma_j(n - 1),
        );
    }
    rep
}

/// The chain tensor is not primitive and `γ_1 = C(n-1, ⌊(n-1)/2⌋) + 1`.
pub fn chain_suite(config: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::Chain);
    for m in config.m.clone() {
        for n in config.n.clone() {
            let t = match chain_tensor(m, n) {
                Ok(t) => t,
                Err(_) => {
                    rep.skipped += 1;
                    continue;
                }
            };
            let d = primitive_degree(&t);
            rep.check((m, n, None, None), "primitive", false, d.is_primitive());
            rep.check(
                (m, n, None, Some(1)),
                "gamma_j",
                Some(binomial(n - 1, (n - 1) / 2) + 1),
                d.gamma_j(1),
            );
        }
    }
    rep
}

/// Seeded random tensors cycling over the `(m, n)` grid and a fixed list of
/// densities; sample `i` uses seed `seed + i`.
pub fn random_tensors(config: &VerifyConfig) -> Result<Vec<PatternTensor>> {
    let grid: Vec<(usize, usize)> = config
        .m
        .clone()
        .flat_map(|m| config.n.clone().map(move |n| (m, n)))
        .collect();
    if grid.is_empty() {
        return Err(Error::BadLimit("empty (m, n) range".into()));
    }
    (0..config.samples.count)
        .map(|i| {
            let (m, n) = grid[i % grid.len()];
            let density = DENSITIES[(i / grid.len()) % DENSITIES.len()];
            let seed = config.samples.seed.wrapping_add(i as u64);
            let mut it = sample_patterns(m, n, 1, seed, density)?;
            Ok(it.next().expect("one sample"))
        })
        .collect()
}

/// `order_lift` preserves `γ`, every `γ_j`, and (non-)primitivity.
pub fn lift_suite(config: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::Lift);
    let tensors = match random_tensors(config) {
        Ok(ts) => ts,
        Err(e) => {
            rep.error((*config.m.start(), *config.n.start(), None, None), "sampling", e);
            return rep;
        }
    };
    for (i, t) in tensors.iter().enumerate() {
        let at = (t.order(), t.dim(), Some(i), None);
        let before = primitive_degree(t);
        let after = primitive_degree(&order_lift(t));
        rep.check(at, "primitive after lift", before.is_primitive(), after.is_primitive());
        rep.check(at, "gamma after lift", before.gamma, after.gamma);
        for j in 1..=t.dim() {
            rep.check(
                (t.order(), t.dim(), Some(i), Some(j)),
                "gamma_j after lift",
                before.gamma_j(j),
                after.gamma_j(j),
            );
        }
    }
    rep
}

/// Bitset dynamics against the majorization-power recurrence (and the walk
/// oracle for matrices) for every `j` and `k <= 2^n`; pruned against
/// unpruned families; family-based positivity of `A^2` against the literal
/// product for `m = 3`, `n <= 3`. Here `k` in a failure is the sample index.
pub fn oracle_suite(config: &VerifyConfig) -> SuiteReport {
    let mut rep = SuiteReport::new(Suite::Oracles);
    let tensors = match random_tensors(config) {
        Ok(ts) => ts,
        Err(e) => {
            rep.error((*config.m.start(), *config.n.start(), None, None), "sampling", e);
            return rep;
        }
    };
    for (i, t) in tensors.iter().enumerate() {
        let (m, n) = (t.order(), t.dim());
        let slices = t.compress();
        let matrix = t.as_matrix();
        for j in 1..=n {
            let at = (m, n, Some(i), Some(j));
            let mut s = s_initial(t, j).expect("valid j");
            for k in 1..=(1usize << n) {
                rep.check(
                    at,
                    &format!("S_{k} vs power recurrence"),
                    majorization_power_column(t, j, k).ok(),
                    Some(s),
                );
                if let Some(mat) = &matrix {
                    rep.check(
                        at,
                        &format!("S_{k} vs walk oracle"),
                        walk_column(mat, j, k).ok(),
                        Some(s),
                    );
                }
                s = step(&slices, s);
            }
        }

        let mut pruned = SetFamily::singletons(n);
        let mut unpruned = SetFamily::singletons(n);
        let mut squared_full = None;
        for g in 1..=FAMILY_GENERATIONS {
            match (family_step(t, &pruned), family_step_unpruned(t, &unpruned)) {
                (Ok(p), Ok(u)) => {
                    pruned = p;
                    unpruned = u;
                }
                _ => break,
            }
            rep.check(
                (m, n, Some(i), None),
                &format!("antichain at generation {g}"),
                pruned.clone(),
                unpruned.antichain(),
            );
            if g == 2 {
                squared_full = Some(pruned.is_full(n));
            }
        }
        if m == 3 && n <= 3 {
            match direct_power(t, 2) {
                Ok(p) => rep.check(
                    (m, n, Some(i), None),
                    "A^2 positive",
                    Some(is_all_positive(&p)),
                    squared_full,
                ),
                Err(e) => rep.error((m, n, Some(i), None), "direct_power", e),
            }
        }
    }
    rep
}

/// Runs every suite, with `config` if given and each suite's defaults
/// otherwise. Tuples outside a family's domain are counted as skipped.
pub fn run_all(config: Option<&VerifyConfig>) -> Vec<SuiteReport> {
    Suite::ALL
        .into_iter()
        .map(|s| {
            let c = config.cloned().unwrap_or_else(|| VerifyConfig::default_for(s));
            run_suite(s, &c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..7").unwrap(), 3..=7);
        assert_eq!(parse_range("3..=7").unwrap(), 3..=7);
        assert_eq!(parse_range("4").unwrap(), 4..=4);
        assert!(parse_range("7..3").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        for s in [Suite::A0, Suite::Ak, Suite::ExponentSet, Suite::M2, Suite::Chain] {
            let mut c = VerifyConfig::default_for(s);
            c.n = *c.n.start()..=*c.n.start();
            let r = run_suite(s, &c);
            assert!(r.passed(), "{s}: {:?}", r.failures);
            assert!(r.checks > 0, "{s}");
        }
    }

    #[test]
    fn random_suites_pass() {
        for s in [Suite::Lift, Suite::Oracles] {
            let mut c = VerifyConfig::default_for(s);
            c.samples.count = 40;
            let r = run_suite(s, &c);
            assert!(r.passed(), "{s}: {:?}", r.failures);
        }
    }

    #[test]
    fn failures_carry_parameters() {
        let mut r = SuiteReport::new(Suite::Ak);
        r.check((3, 5, Some(2), Some(1)), "gamma_j", Some(6), Some(7));
        assert!(!r.passed());
        assert_eq!(
            r.failures[0].to_string(),
            "[ak] m=3 n=5 k=2 j=1: gamma_j expected Some(6) got Some(7)"
        );
    }

    #[test]
    fn exponent_set_counts_constructions() {
        let c = VerifyConfig {
            m: 3..=3,
            n: 4..=4,
            samples: SampleParams::default(),
        };
        let r = exponent_set_suite(&c);
        assert!(r.passed());
        assert_eq!(r.checks, 10);
    }
}
