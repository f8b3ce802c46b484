//! The `relent` command-line driver.
//!
//! Exit codes: 0 on success (or when every expected verdict matched), 1 on a
//! verification mismatch or a domain error, 2 on a usage error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::channels::{
    apply_channel, apply_complementary, apply_complementary_via_dilation, partial_trace_kraus,
    stinespring_isometry,
};
use crate::entropy::{relative_entropy, LogBase};
use crate::error::{Error, Result};
use crate::inequalities::{
    channel_complement_gap, conjecture_witness, sampled_orbit_range, superadditivity_gap, unitary_orbit_extrema,
    violation_search, weak_superadditivity_slack, GapReport, InequalityId, SearchConfig, StateClass, Verdict,
    TOL_VERDICT,
};
use crate::json::{to_line, MatrixJson, Num};
use crate::linalg::{max_norm, DensityMatrix, Subsystem};
use crate::states::{example1_states, example2_states, hayashi_pair, random_channel, random_density, SeededGenerator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const LAMBDA_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const HAYASHI_DRAWS: u64 = 4;

#[derive(Debug, Parser)]
#[command(name = "relent", version, about = "Quantum relative-entropy inequality checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Re-derive the known counterexamples and proven cases; exit 1 on any mismatch.
    VerifyPaper(VerifyArgs),
    /// Seeded violation search; JSONL reports on stdout or --out.
    Search(SearchArgs),
    /// Exact unitary-orbit extrema of S(U rho U^dagger || sigma).
    Orbit(OrbitArgs),
    /// Stinespring and complementary-channel consistency for a random channel.
    ChannelDemo(ChannelDemoArgs),
    /// Weak-superadditivity campaign (search with --ineq weak-superadd).
    Conjecture(ConjectureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Logarithm base for reported values: e or 2.
    #[arg(long, default_value = "e")]
    pub base: LogBase,
    /// Slack below -tol counts as a violation; read in the units of --base.
    #[arg(long, default_value_t = TOL_VERDICT)]
    pub tol_verdict: f64,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, env = "RELENT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CampaignArgs {
    #[arg(long, value_parser = parse_dims, default_value = "2x2")]
    pub dims: [usize; 2],
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, env = "RELENT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// diagonal, full-rank, pure-vs-mixed or product-sigma.
    #[arg(long, default_value = "full-rank")]
    pub class: StateClass,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Write the summary JSON here instead of stderr.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Write the resolved run manifest here.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Emit every trial, not only confirmed violations.
    #[arg(long)]
    pub all: bool,
    /// Inline the state pair into each report.
    #[arg(long)]
    pub with_states: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// superadd, channel-comp, li-winter, uniform, weak-superadd or conj.
    #[arg(long, default_value = "superadd")]
    pub ineq: InequalityId,
    /// Re-run the configuration recorded in a manifest; other flags are ignored.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// rho as matrix JSON.
    #[arg(required_unless_present = "demo")]
    pub rho: Option<PathBuf>,
    /// sigma as matrix JSON; must be full rank.
    #[arg(required_unless_present = "demo")]
    pub sigma: Option<PathBuf>,
    /// Use rho = |0><0| and sigma = diag(0.7, 0.3).
    #[arg(long, conflicts_with_all = ["rho", "sigma"])]
    pub demo: bool,
    /// Haar samples for the bracketing check.
    #[arg(long, default_value_t = 0)]
    pub mc_trials: usize,
    #[arg(long, env = "RELENT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ChannelDemoArgs {
    /// Input x output dimensions of the random channel.
    #[arg(long, value_parser = parse_dims, default_value = "2x2")]
    pub dims: [usize; 2],
    /// Number of Kraus operators.
    #[arg(long, default_value_t = 3)]
    pub env: usize,
    #[arg(long, env = "RELENT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_dims(s: &str) -> std::result::Result<[usize; 2], String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected AxB, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad dimension {t:?}: {e}"));
    let dims = [parse(a)?, parse(b)?];
    if dims.contains(&0) {
        return Err("dimensions must be positive".into());
    }
    Ok(dims)
}

/// Everything needed to reproduce a run's output files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: SearchConfig,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, config: SearchConfig) -> Self {
        Self {
            command: command.into(),
            seed: config.seed,
            config,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "relent: {e}");
            match e {
                Error::Config(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::VerifyPaper(args) => verify_paper(args, stdout, stderr),
        Command::Search(args) => {
            let config = match &args.replay {
                Some(path) => {
                    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(path)?)?;
                    manifest.config
                }
                None => campaign_config(args.ineq, &args.campaign),
            };
            search(&config, &args.campaign, "search", stdout, stderr)
        }
        Command::Conjecture(args) => {
            let config = campaign_config(InequalityId::WeakSuperadditivity, &args.campaign);
            search(&config, &args.campaign, "conjecture", stdout, stderr)
        }
        Command::Orbit(args) => orbit(args, stdout, stderr),
        Command::ChannelDemo(args) => channel_demo(args, stdout),
    }
}

fn write_output(path: Option<&Path>, fallback: &mut dyn Write, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => fallback.write_all(text.as_bytes())?,
    }
    Ok(())
}

// ---------------------------------------------------------------- verify-paper

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    expected: Verdict,
    computed: String,
    matches: bool,
    report: GapReport,
}

impl Check {
    fn new(name: impl Into<String>, expected: Verdict, report: GapReport) -> Self {
        Self {
            name: name.into(),
            expected,
            computed: report.verdict_label(),
            matches: report.verdict == expected,
            report,
        }
    }
}

#[derive(Debug, Serialize)]
struct Section {
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Bundle {
    base: LogBase,
    tol_verdict: f64,
    example1: Section,
    example2: Section,
    partial_trace_reduction: Section,
    hayashi_pinching: Section,
    weak_superadditivity: Section,
    all_match: bool,
}

impl Bundle {
    fn sections(&self) -> [(&'static str, &Section); 5] {
        [
            ("example1", &self.example1),
            ("example2", &self.example2),
            ("partial_trace_reduction", &self.partial_trace_reduction),
            ("hayashi_pinching", &self.hayashi_pinching),
            ("weak_superadditivity", &self.weak_superadditivity),
        ]
    }
}

fn verify_paper(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let base = args.output.base;
    let tol = args.output.tol_verdict;
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Config(format!("invalid verdict tolerance {tol}")));
    }
    let scale = |r: GapReport| r.in_base(base, tol);

    let mut example1 = Section { checks: vec![], notes: vec![] };
    for lambda in LAMBDA_GRID {
        let pair = example1_states(lambda, 2, 2)?;
        let r = scale(superadditivity_gap(&pair)?);
        example1.checks.push(Check::new(format!("lambda={lambda}"), Verdict::Violated, r));
    }

    let ex2 = example2_states();
    let mut example2 = Section { checks: vec![], notes: vec![] };
    let ex2_report = superadditivity_gap(&ex2)?;
    let ex2_slack = ex2_report.slack();
    example2.checks.push(Check::new("superadditivity", Verdict::Violated, scale(ex2_report)));
    for side in [Subsystem::A, Subsystem::B] {
        let fmt = |v: Vec<f64>| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
        example2.notes.push(format!(
            "rho_{side:?} = diag({}), sigma_{side:?} = diag({})",
            fmt(ex2.rho.reduce(side)?.diagonal()),
            fmt(ex2.sigma.reduce(side)?.diagonal()),
        ));
    }

    let mut reduction = Section { checks: vec![], notes: vec![] };
    let ptrace = partial_trace_kraus([2, 2], Subsystem::B)?;
    let r = channel_complement_gap(&ex2.rho, &ex2.sigma, &ptrace)?;
    reduction.notes.push(format!(
        "slack difference from superadditivity: {:.3e}",
        (r.slack() - ex2_slack).abs()
    ));
    reduction.checks.push(Check::new("partial trace over B", Verdict::Violated, scale(r)));

    let mut hayashi = Section { checks: vec![], notes: vec![] };
    for d in 2..=4 {
        for draw in 0..HAYASHI_DRAWS {
            let mut gen = SeededGenerator::new(args.seed, (d as u64) << 32 | draw);
            let (pair, pinch) = hayashi_pair(d, &mut gen)?;
            let r = scale(channel_complement_gap(&pair.rho, &pair.sigma, &pinch)?.with_provenance(args.seed, gen.stream()));
            hayashi.checks.push(Check::new(format!("d={d} draw={draw}"), Verdict::Violated, r));
        }
    }

    let mut weak = Section { checks: vec![], notes: vec![] };
    weak.checks.push(Check::new("example 2", Verdict::Holds, scale(weak_superadditivity_slack(&ex2)?)));
    let w = conjecture_witness(&ex2)?;
    weak.checks.push(Check::new("example 2 witnesses", Verdict::Holds, scale(w.report)));

    let mut bundle = Bundle {
        base,
        tol_verdict: tol,
        example1,
        example2,
        partial_trace_reduction: reduction,
        hayashi_pinching: hayashi,
        weak_superadditivity: weak,
        all_match: false,
    };
    let mismatches: Vec<String> = bundle
        .sections()
        .iter()
        .flat_map(|(section, s)| {
            s.checks.iter().filter(|c| !c.matches).map(move |c| {
                format!("{section}/{}: expected {}, computed {}", c.name, c.expected, c.computed)
            })
        })
        .collect();
    bundle.all_match = mismatches.is_empty();

    let text = serde_json::to_string_pretty(&bundle)? + "\n";
    write_output(args.output.out.as_deref(), stdout, &text)?;
    if mismatches.is_empty() {
        return Ok(EXIT_OK);
    }
    writeln!(stderr, "verdict mismatches:")?;
    for m in &mismatches {
        writeln!(stderr, "  {m}")?;
    }
    if tol > base.convert(ex2_slack.abs()) {
        writeln!(
            stderr,
            "tolerance {tol} exceeds |slack| of a known violation ({:.6e}); it masks the counterexample",
            base.convert(ex2_slack.abs())
        )?;
    }
    Ok(EXIT_FAILURE)
}

// ---------------------------------------------------------------- search

fn campaign_config(ineq: InequalityId, c: &CampaignArgs) -> SearchConfig {
    SearchConfig {
        inequality: ineq,
        dims: c.dims,
        trials: c.trials,
        seed: c.seed,
        class: c.class,
        tol_verdict: c.output.tol_verdict,
        base: c.output.base,
        emit_all: c.all,
        with_states: c.with_states,
    }
}

fn search(
    config: &SearchConfig,
    c: &CampaignArgs,
    command: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let outcome = violation_search(config)?;
    let mut text = String::new();
    for r in &outcome.reports {
        text.push_str(&to_line(r)?);
        text.push('\n');
    }
    write_output(c.output.out.as_deref(), stdout, &text)?;
    let summary = to_line(&outcome.summary)? + "\n";
    write_output(c.summary.as_deref(), stderr, &summary)?;
    if let Some(path) = &c.manifest {
        let manifest = RunManifest::new(command, config.clone());
        fs::write(path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- orbit

#[derive(Debug, Serialize)]
struct OrbitOutput {
    min: Num,
    max: Num,
    minimizing_permutation: Vec<usize>,
    maximizing_permutation: Vec<usize>,
    identity_value: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<MonteCarlo>,
}

#[derive(Debug, Serialize)]
struct MonteCarlo {
    trials: usize,
    seed: u64,
    sampled_min: Num,
    sampled_max: Num,
    all_within: bool,
}

/// Reads a state as matrix JSON.
pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    let json: MatrixJson = serde_json::from_str(&fs::read_to_string(path)?)?;
    DensityMatrix::new(json.to_matrix()?)
}

fn orbit(args: &OrbitArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (rho, sigma) = match (&args.rho, &args.sigma) {
        (Some(r), Some(s)) if !args.demo => (read_state(r)?, read_state(s)?),
        _ => (DensityMatrix::from_diagonal(&[1.0, 0.0])?, DensityMatrix::from_diagonal(&[0.7, 0.3])?),
    };
    let base = args.output.base;
    let e = unitary_orbit_extrema(&rho, &sigma)?;
    let identity_value = relative_entropy(&rho, &sigma)?.to_f64();
    let monte_carlo = if args.mc_trials > 0 {
        let mut gen = SeededGenerator::new(args.seed, 0);
        let (lo, hi) = sampled_orbit_range(&rho, &sigma, args.mc_trials, &mut gen)?;
        let all_within = lo >= e.min_value - 1e-9 && hi <= e.max_value + 1e-9;
        writeln!(stderr, "all samples within extrema: {all_within}")?;
        Some(MonteCarlo {
            trials: args.mc_trials,
            seed: args.seed,
            sampled_min: Num(base.convert(lo)),
            sampled_max: Num(base.convert(hi)),
            all_within,
        })
    } else {
        None
    };
    let out = OrbitOutput {
        min: Num(base.convert(e.min_value)),
        max: Num(base.convert(e.max_value)),
        minimizing_permutation: e.minimizing_permutation,
        maximizing_permutation: e.maximizing_permutation,
        identity_value: Num(base.convert(identity_value)),
        monte_carlo,
    };
    write_output(args.output.out.as_deref(), stdout, &(serde_json::to_string_pretty(&out)? + "\n"))?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- channel-demo

#[derive(Debug, Serialize)]
struct ChannelDemo {
    dim_in: usize,
    dim_out: usize,
    env: usize,
    seed: u64,
    completeness_defect: Num,
    isometry_defect: Num,
    channel_vs_dilation: Num,
    complement_vs_dilation: Num,
    complement_trace: Num,
}

fn channel_demo(args: &ChannelDemoArgs, stdout: &mut dyn Write) -> Result<i32> {
    let [d_in, d_out] = args.dims;
    let mut gen = SeededGenerator::new(args.seed, 0);
    let k = random_channel(d_in, d_out, args.env, &mut gen)?;
    let rho = random_density(d_in, d_in, &mut gen)?;
    let v = stinespring_isometry(&k)?;
    let vm = v.matrix();
    let gram = vm.adjoint() * vm - crate::linalg::ComplexMatrix::identity(d_in, d_in);
    let direct = apply_channel(&k, &rho)?;
    let complement = apply_complementary(&k, &rho)?;
    let demo = ChannelDemo {
        dim_in: d_in,
        dim_out: d_out,
        env: args.env,
        seed: args.seed,
        completeness_defect: Num(k.completeness().defect),
        isometry_defect: Num(max_norm(&gram)),
        channel_vs_dilation: Num(max_norm(&(v.trace_env(&rho)?.matrix() - direct.matrix()))),
        complement_vs_dilation: Num(max_norm(
            &(apply_complementary_via_dilation(&k, &rho)?.matrix() - complement.matrix()),
        )),
        complement_trace: Num(complement.matrix().trace().re),
    };
    write_output(args.out.as_deref(), stdout, &(serde_json::to_string_pretty(&demo)? + "\n"))?;
    Ok(EXIT_OK)
}

/// Entry point for the binary.
pub fn main_with_args() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
