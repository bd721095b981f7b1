use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use primdeg::constructions::{
    chain_tensor, example_415, exponent_t_matrix, m2_matrix, tensor_a0, tensor_ak, tensor_bt, wielandt_matrix,
};
use primdeg::dynamics::{majorization_power_column, primitive_degree, s_initial, step, walk_column, JDegree};
use primdeg::explore::{
    conjecture45_scan, exponent_scan, r2_exhaustive, replay, rj_scan, AtlasReport, ScanConfig, ScanMode,
    DEFAULT_DENSITY,
};
use primdeg::graph::is_reducible_tensor;
use primdeg::io::{tensor_from_json, tensor_to_json, tensors_from_json, tensors_to_json};
use primdeg::strong::{
    direct_power, family_step, is_all_positive, strongly_primitive_degree, SetFamily, StrongReport, DEFAULT_CAP,
};
use primdeg::verify::{parse_range, run_suite, SampleParams, Suite, SuiteReport, VerifyConfig};
use primdeg::{Error, IndexSet, PatternTensor};

/// Largest dimension for which `analyze --verify-oracles` runs the
/// `k <= 2^n` sweep.
const ORACLE_SWEEP_MAX_DIM: usize = 12;

#[derive(Parser)]
#[command(
    name = "primdeg",
    version,
    about = "Primitivity degrees of nonnegative tensor zero patterns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Degrees, reducibility and strong primitivity of a pattern-tensor JSON file.
    Analyze {
        /// Pattern-tensor JSON file ("-" for stdin).
        file: PathBuf,
        /// Report gamma_j for every j.
        #[arg(long)]
        per_j: bool,
        /// Compute the strongly primitive degree eta.
        #[arg(long)]
        strong: bool,
        /// Generation cap for eta.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Cross-check the dynamics against the independent oracles.
        #[arg(long)]
        verify_oracles: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Writes a construction as pattern-tensor JSON.
    Construct {
        #[arg(value_enum)]
        name: Family,
        /// Tensor order.
        #[arg(long)]
        m: Option<usize>,
        /// Dimension.
        #[arg(long)]
        n: Option<usize>,
        /// Index of A_k, 1 <= k <= n^2-3n+2.
        #[arg(long)]
        k: Option<usize>,
        /// Target exponent: 1 <= t <= (n-1)^2+1 for bt, 1 <= t <= n for exp-matrix.
        #[arg(long)]
        t: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Runs property suites over ranges of (m, n); exits 1 on any failure.
    Verify {
        #[arg(value_parser = parse_suite_arg)]
        suite: SuiteArg,
        /// Order range, e.g. 3..4 (default: per suite).
        #[arg(long)]
        m: Option<String>,
        /// Dimension range, e.g. 3..7 (default: per suite).
        #[arg(long)]
        n: Option<String>,
        /// Random tensors for the lift and oracles suites.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive or sampled scans; exits 1 only on soundness violations.
    Explore {
        #[arg(value_enum)]
        target: Target,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Column for rj.
        #[arg(long, default_value_t = 1)]
        j: usize,
        /// Scan the whole pattern space (default unless --samples is given).
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Number of sampled patterns.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Entry inclusion probability for sampling.
        #[arg(long, default_value_t = DEFAULT_DENSITY)]
        density: f64,
        /// Worker threads (0: one per core). Output does not depend on it.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Extra patterns (JSON list) appended to an rj scan.
        #[arg(long)]
        extra: Option<PathBuf>,
        /// Write counterexample candidates here as a replayable JSON list.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-classifies a replay file of counterexample candidates.
    Replay { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    M1,
    M2,
    A0,
    Ak,
    Bt,
    Chain,
    ExpMatrix,
    Example415,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Conjecture45,
    Rj,
    R2,
    ExponentAtlas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SuiteArg {
    One(Suite),
    All,
}

fn parse_suite_arg(s: &str) -> Result<SuiteArg, String> {
    if s == "all" {
        return Ok(SuiteArg::All);
    }
    s.parse().map(SuiteArg::One).map_err(|e: Error| e.to_string())
}

enum Failure {
    /// Bad input or parameters: exit 2.
    Usage(String),
    /// A theorem-level check failed: exit 1.
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SelfCheckFailed(_) => Failure::Violation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Analyze {
            file,
            per_j,
            strong,
            cap,
            verify_oracles,
            format,
            output,
        } => {
            let t = tensor_from_json(&read_input(&file)?)?;
            let report = analyze(&t, per_j, strong.then_some(cap), verify_oracles)?;
            let text = match format {
                Format::Json => to_json(&report),
                Format::Text => report.to_text(),
                Format::Csv => report.to_csv(),
            };
            emit(output.as_deref(), &text)?;
            if report.oracles.as_ref().is_some_and(|o| !o.all_agree()) {
                return Err(Failure::Violation("oracle disagreement".into()));
            }
            Ok(())
        }
        Command::Construct {
            name,
            m,
            n,
            k,
            t,
            output,
        } => {
            let tensor = construct(name, m, n, k, t)?;
            emit(output.as_deref(), &(tensor_to_json(&tensor) + "\n"))
        }
        Command::Verify {
            suite,
            m,
            n,
            samples,
            seed,
            format,
            output,
        } => {
            let suites: Vec<Suite> = match suite {
                SuiteArg::One(s) => vec![s],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            let m = m.as_deref().map(parse_range).transpose()?;
            let n = n.as_deref().map(parse_range).transpose()?;
            if samples < 1 {
                return Err(Failure::Usage("--samples must be at least 1".into()));
            }
            let reports: Vec<SuiteReport> = suites
                .into_iter()
                .map(|s| {
                    let mut c = VerifyConfig::default_for(s);
                    if let Some(m) = &m {
                        c.m = m.clone();
                    }
                    if let Some(n) = &n {
                        c.n = n.clone();
                    }
                    c.samples = SampleParams { count: samples, seed };
                    run_suite(s, &c)
                })
                .collect();
            let text = match format {
                Format::Json => to_json(&reports),
                Format::Text | Format::Csv => verify_text(&reports),
            };
            emit(output.as_deref(), &text)?;
            if reports.iter().all(SuiteReport::passed) {
                Ok(())
            } else {
                Err(Failure::Violation("verification failed".into()))
            }
        }
        Command::Explore {
            target,
            m,
            n,
            j,
            exhaustive: _,
            samples,
            seed,
            density,
            workers,
            extra,
            replay,
            format,
            output,
        } => {
            let mode = match samples {
                Some(count) => ScanMode::Sampled { count, seed, density },
                None => ScanMode::Exhaustive,
            };
            let config = ScanConfig { mode, workers };
            let report = match target {
                Target::Conjecture45 => conjecture45_scan(m, n, &config)?,
                Target::Rj => {
                    let extras = match &extra {
                        Some(p) => tensors_from_json(&read_input(p)?)?,
                        None => Vec::new(),
                    };
                    rj_scan(m, n, j, &config, &extras)?
                }
                Target::R2 => r2_exhaustive(n, workers)?,
                Target::ExponentAtlas => exponent_scan(m, n)?,
            };
            if let Some(path) = &replay {
                let candidates: Vec<PatternTensor> = report
                    .results
                    .counterexamples
                    .iter()
                    .map(|c| PatternTensor::try_from(c.tensor.clone()))
                    .collect::<Result<_, _>>()?;
                fs::write(path, tensors_to_json(&candidates) + "\n")?;
            }
            emit(output.as_deref(), &render_atlas(&report, format))?;
            if report.violations.is_empty() {
                Ok(())
            } else {
                Err(Failure::Violation(format!(
                    "{} soundness violations",
                    report.violations.len()
                )))
            }
        }
        Command::Replay { file } => {
            let tensors = tensors_from_json(&read_input(&file)?)?;
            let rows = replay(&tensors)?;
            println!("{}", to_json(&rows));
            if rows.iter().all(|r| r.reverified) {
                Ok(())
            } else {
                Err(Failure::Violation(
                    "replayed candidate failed oracle re-verification".into(),
                ))
            }
        }
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        return std::io::read_to_string(std::io::stdin()).map_err(Failure::from);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn render_atlas(report: &AtlasReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
    }
}

fn require(name: &str, v: Option<usize>) -> CliResult<usize> {
    v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this construction")))
}

fn construct(
    name: Family,
    m: Option<usize>,
    n: Option<usize>,
    k: Option<usize>,
    t: Option<usize>,
) -> CliResult<PatternTensor> {
    let m_or_3 = || m.unwrap_or(3);
    Ok(match name {
        Family::M1 => wielandt_matrix(require("n", n)?)?.to_tensor(),
        Family::M2 => m2_matrix(require("n", n)?)?.to_tensor(),
        Family::A0 => tensor_a0(m_or_3(), require("n", n)?)?,
        Family::Ak => tensor_ak(m_or_3(), require("n", n)?, require("k", k)?)?,
        Family::Bt => tensor_bt(m_or_3(), require("n", n)?, require("t", t)?)?,
        Family::Chain => chain_tensor(m_or_3(), require("n", n)?)?,
        Family::ExpMatrix => exponent_t_matrix(require("n", n)?, require("t", t)?)?.to_tensor(),
        Family::Example415 => example_415(),
    })
}

#[derive(Serialize)]
struct OracleChecks {
    /// `None` when `n` is too large for the sweep.
    power_recurrence: Option<bool>,
    walk: Option<bool>,
    /// Family-based positivity of `A^2` against the literal product.
    square_positivity: Option<bool>,
}

impl OracleChecks {
    fn all_agree(&self) -> bool {
        [self.power_recurrence, self.walk, self.square_positivity]
            .iter()
            .all(|c| c.unwrap_or(true))
    }
}

#[derive(Serialize)]
struct AnalysisReport {
    order: usize,
    dim: usize,
    entries: usize,
    primitive: bool,
    gamma: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_j: Option<Vec<JDegree>>,
    j_primitive: IndexSet,
    irreducible: bool,
    reducibility_witness: Option<IndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strong: Option<StrongReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracles: Option<OracleChecks>,
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn check_mark(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "agree",
        Some(false) => "DISAGREE",
        None => "skipped",
    }
}

impl AnalysisReport {
    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "order        {}", self.order);
        let _ = writeln!(out, "dim          {}", self.dim);
        let _ = writeln!(out, "entries      {}", self.entries);
        let _ = writeln!(
            out,
            "primitive    {}",
            if self.primitive { "yes" } else { "not primitive" }
        );
        let _ = writeln!(out, "gamma        {}", opt(self.gamma));
        let _ = writeln!(out, "j-primitive  {}", self.j_primitive);
        match self.reducibility_witness {
            None => {
                let _ = writeln!(out, "irreducible  yes");
            }
            Some(w) => {
                let _ = writeln!(out, "irreducible  no (witness {w})");
            }
        }
        if let Some(per_j) = &self.gamma_j {
            for (i, d) in per_j.iter().enumerate() {
                let _ = writeln!(out, "gamma_{:<6} {}", i + 1, opt(d.value()));
            }
        }
        if let Some(s) = &self.strong {
            let line = match s {
                StrongReport::StronglyPrimitive { eta } => eta.to_string(),
                StrongReport::PrecheckFailed { tail } => format!("- (no entry with tail {tail:?})"),
                StrongReport::FamilyCycle { start, length } => {
                    format!("- (family cycle from {start}, length {length})")
                }
                StrongReport::CapExhausted { cap } => format!("- (cap {cap} exhausted)"),
            };
            let _ = writeln!(out, "eta          {line}");
        }
        if let Some(o) = &self.oracles {
            let _ = writeln!(out, "oracle power {}", check_mark(o.power_recurrence));
            let _ = writeln!(out, "oracle walk  {}", check_mark(o.walk));
            let _ = writeln!(out, "oracle A^2   {}", check_mark(o.square_positivity));
        }
        out
    }

    fn to_csv(&self) -> String {
        let mut out = String::from("j,gamma_j\n");
        for (i, d) in self.gamma_j.iter().flatten().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, d.value().map_or(String::new(), |v| v.to_string()));
        }
        out
    }
}

fn analyze(t: &PatternTensor, per_j: bool, cap: Option<usize>, oracles: bool) -> CliResult<AnalysisReport> {
    let degrees = primitive_degree(t);
    let witness = is_reducible_tensor(t)?;
    let strong = cap.map(|c| strongly_primitive_degree(t, c)).transpose()?;
    Ok(AnalysisReport {
        order: t.order(),
        dim: t.dim(),
        entries: t.len(),
        primitive: degrees.is_primitive(),
        gamma: degrees.gamma,
        gamma_j: per_j.then(|| degrees.per_j.clone()),
        j_primitive: degrees.j_primitive_set(),
        irreducible: witness.is_none(),
        reducibility_witness: witness,
        strong,
        oracles: oracles.then(|| oracle_checks(t)),
    })
}

fn oracle_checks(t: &PatternTensor) -> OracleChecks {
    let n = t.dim();
    let matrix = t.as_matrix();
    let (mut power, mut walk) = (None, None);
    if n <= ORACLE_SWEEP_MAX_DIM {
        let slices = t.compress();
        let (mut p_ok, mut w_ok) = (true, true);
        for j in 1..=n {
            let mut s = s_initial(t, j).expect("valid column");
            for k in 1..=(1usize << n) {
                p_ok &= majorization_power_column(t, j, k).ok() == Some(s);
                if let Some(m) = &matrix {
                    w_ok &= walk_column(m, j, k).ok() == Some(s);
                }
                s = step(&slices, s);
            }
        }
        power = Some(p_ok);
        walk = matrix.is_some().then_some(w_ok);
    }
    let square_positivity = direct_power(t, 2).ok().map(|p| {
        let f1 = family_step(t, &SetFamily::singletons(n)).expect("nonempty family");
        let full = !f1.is_empty() && family_step(t, &f1).is_ok_and(|f2| f2.is_full(n));
        full == is_all_positive(&p)
    });
    OracleChecks {
        power_recurrence: power,
        walk,
        square_positivity,
    }
}

fn verify_text(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let name = r.suite.map_or("?", Suite::name);
        let _ = writeln!(
            out,
            "{:<14} {}  {} checks, {} failures, {} skipped",
            name,
            if r.passed() { "PASS" } else { "FAIL" },
            r.checks,
            r.failures.len(),
            r.skipped
        );
        for f in &r.failures {
            let _ = writeln!(out, "  {f}");
        }
    }
    out
}
