//! Argument parsing and dispatch.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::commands::{self, Outcome};
use crate::corpus;
use crate::output::{self, Format};
use crate::params::*;
use crate::RunError;

#[derive(Debug, Parser)]
#[command(name = "tdgn", version, about = "Numerical workbench for the time-dependent SU(2) Gross-Neveu model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON file with parameter keys (and optionally "seed"); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for randomized sweeps; recorded in every output.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Yang–Baxter identities over seeded random triples.
    VerifyYb(WithCommon<VerifyYbFlags>),
    /// Transport compatibility and transfer-matrix commutation.
    VerifyTransport(WithCommon<VerifyTransportFlags>),
    /// Jackson amplitude against the qKZ equation, Yang–Yang action and saddle point.
    QkzCheck(WithCommon<QkzCheckFlags>),
    /// Solve the logarithmic Bethe equations.
    SolveBethe(WithCommon<SolveBetheFlags>),
    /// Bethe vectors against exact diagonalization.
    VerifyEigen(WithCommon<VerifyEigenFlags>),
    /// Ground-state and two-hole root densities.
    Density(WithCommon<DensityFlags>),
    /// Spinon dispersion and finite-size gap.
    SpinonFit(WithCommon<SpinonFitFlags>),
    /// Time-dependent mass gap.
    MassGap(WithCommon<MassGapFlags>),
    /// RG form of the coupling trajectory.
    RgFlow(WithCommon<RgFlowFlags>),
    /// Driving regime at a given time.
    ClassifyRegime(WithCommon<ClassifyRegimeFlags>),
    /// Classical r-matrix limit.
    RClassical(WithCommon<RClassicalFlags>),
    /// Replay golden records.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct WithCommon<F: Args> {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    flags: F,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// Golden record files.
    files: Vec<PathBuf>,
    /// Replay every record in the corpus directory.
    #[arg(long)]
    all: bool,
    /// Rewrite golden values from fresh runs (provenance rules apply).
    #[arg(long)]
    bless: bool,
    #[arg(long, default_value = corpus::DEFAULT_CORPUS)]
    corpus: PathBuf,
    /// Replace every record tolerance (strictness check of the harness).
    #[arg(long)]
    tolerance_override: Option<f64>,
}

pub const COMMANDS: [&str; 11] = [
    "verify-yb",
    "verify-transport",
    "qkz-check",
    "solve-bethe",
    "verify-eigen",
    "density",
    "spinon-fit",
    "mass-gap",
    "rg-flow",
    "classify-regime",
    "r-classical",
];

/// A resolved and executed command.
#[derive(Debug, Clone)]
pub struct Run {
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub outcome: Outcome,
}

impl Run {
    pub fn envelope(&self) -> Value {
        output::envelope(&self.command, self.seed, &self.config, self.outcome.pass, self.outcome.result.clone())
    }
}

fn go<P, F>(config: Option<&Map<String, Value>>, flags: Map<String, Value>, f: F) -> Result<(Value, Outcome), RunError>
where
    P: Default + Serialize + for<'de> Deserialize<'de>,
    F: FnOnce(&P) -> Result<Outcome, RunError>,
{
    let p: P = resolve(config, flags)?;
    let cfg = serde_json::to_value(&p).map_err(|e| RunError::Usage(e.to_string()))?;
    Ok((cfg, f(&p)?))
}

/// Runs `command` from a config object (parameter keys plus optional `seed`)
/// and flag overrides.
pub fn execute(command: &str, config: Option<&Map<String, Value>>, flags: Map<String, Value>, seed: Option<u64>) -> Result<Run, RunError> {
    let mut config = config.cloned();
    let file_seed = match config.as_mut().and_then(|c| c.remove("seed")) {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| RunError::Usage(format!("seed must be a non-negative integer, got {v}")))?),
    };
    let seed = seed.or(file_seed).unwrap_or(tdgn_core::DEFAULT_SEED);
    let c = config.as_ref();
    let (cfg, outcome) = match command {
        "verify-yb" => go::<VerifyYbParams, _>(c, flags, |p| commands::verify_yb(p, seed))?,
        "verify-transport" => go::<VerifyTransportParams, _>(c, flags, |p| commands::verify_transport(p, seed))?,
        "qkz-check" => go::<QkzCheckParams, _>(c, flags, commands::qkz_check)?,
        "solve-bethe" => go::<SolveBetheParams, _>(c, flags, commands::solve_bethe)?,
        "verify-eigen" => go::<VerifyEigenParams, _>(c, flags, commands::verify_eigen)?,
        "density" => go::<DensityParams, _>(c, flags, commands::density)?,
        "spinon-fit" => go::<SpinonFitParams, _>(c, flags, commands::spinon_fit)?,
        "mass-gap" => go::<MassGapParams, _>(c, flags, commands::mass_gap_cmd)?,
        "rg-flow" => go::<RgFlowParams, _>(c, flags, commands::rg_flow)?,
        "classify-regime" => go::<ClassifyRegimeParams, _>(c, flags, commands::classify)?,
        "r-classical" => go::<RClassicalParams, _>(c, flags, commands::r_classical)?,
        other => return Err(RunError::Usage(format!("unknown command {other:?}"))),
    };
    Ok(Run { command: command.to_string(), seed, config: cfg, outcome })
}

fn default_format(command: &str) -> Format {
    match command {
        "mass-gap" => Format::Csv,
        _ => Format::Json,
    }
}

fn load_config(path: &Path) -> Result<Map<String, Value>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(RunError::Usage(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(RunError::Usage(format!("{}: {e}", path.display()))),
    }
}

fn run_command(name: &str, common: &Common, flags: Map<String, Value>) -> Result<i32, RunError> {
    let config = common.config.as_deref().map(load_config).transpose()?;
    let run = execute(name, config.as_ref(), flags, common.seed)?;
    let format = common.format.unwrap_or_else(|| default_format(name));
    output::emit(&run.envelope(), run.outcome.table.as_ref(), format, common.output.as_deref())?;
    Ok(if run.outcome.pass { 0 } else { 2 })
}

fn dispatch(cmd: Command) -> (Option<&'static str>, Result<i32, RunError>) {
    macro_rules! cmd {
        ($name:literal, $w:expr) => {
            (Some($name), run_command($name, &$w.common, $w.flags.overrides()))
        };
    }
    match cmd {
        Command::VerifyYb(w) => cmd!("verify-yb", w),
        Command::VerifyTransport(w) => cmd!("verify-transport", w),
        Command::QkzCheck(w) => cmd!("qkz-check", w),
        Command::SolveBethe(w) => cmd!("solve-bethe", w),
        Command::VerifyEigen(w) => cmd!("verify-eigen", w),
        Command::Density(w) => cmd!("density", w),
        Command::SpinonFit(w) => cmd!("spinon-fit", w),
        Command::MassGap(w) => cmd!("mass-gap", w),
        Command::RgFlow(w) => cmd!("rg-flow", w),
        Command::ClassifyRegime(w) => cmd!("classify-regime", w),
        Command::RClassical(w) => cmd!("r-classical", w),
        Command::Replay(r) => (Some("replay"), replay(r)),
    }
}

fn replay(r: ReplayArgs) -> Result<i32, RunError> {
    let mut files = r.files;
    if r.all {
        files.extend(corpus::list_records(&r.corpus)?);
    }
    if files.is_empty() {
        return Err(RunError::Usage("replay needs record files or --all".into()));
    }
    let summary = corpus::replay_files(&files, r.bless, r.tolerance_override)?;
    for line in &summary.lines {
        println!("{line}");
    }
    println!("{} passed, {} failed, {} skipped", summary.passed, summary.failed, summary.skipped);
    Ok(if summary.failed == 0 { 0 } else { 2 })
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, res) = dispatch(cli.command);
    match res {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", output::diagnostic(name, &err));
            err.exit_code()
        }
    }
}
