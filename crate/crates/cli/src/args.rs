use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use epicongress::gain::{EpsRule, FamilyRule};
use epicongress::{ProfileSource, SimulationMode};

/// Optimal congress size and the accuracy of congresses versus direct democracy.
#[derive(Debug, Parser)]
#[command(name = "epicongress", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Votes,
}

impl From<Mode> for SimulationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => SimulationMode::ExactConditional,
            Mode::Votes => SimulationMode::VoteSampling,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Seed for every random stream [default: 20240601]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials (defaults to the command's own default)
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Output format (grids default to csv, single results to json)
    #[arg(long, global = true, value_enum)]
    pub out: Option<OutFormat>,
    /// How Monte Carlo trials are scored
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Write data here instead of stdout; the run manifest goes to PATH.manifest.json
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Suppress progress on stderr
    #[arg(long, short = 'q', global = true)]
    #[serde(skip)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distribution of the number of correct votes
    Pmf(PmfArgs),
    /// Exact accuracy-maximizing congress size
    OptimalSize(OptimalSizeArgs),
    /// Linear brackets on the optimal size
    Bounds(BoundsArgs),
    /// Gain of a top-k congress over direct democracy
    Gain(GainArgs),
    /// Gain sweep over population sizes
    Experiment(ExperimentArgs),
    /// Log-log regression of legislature size on population
    Regress(RegressArgs),
    /// Sufficient conditions for the sign of the gain
    Conditions(ConditionsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pmf(_) => "pmf",
            Command::OptimalSize(_) => "optimal-size",
            Command::Bounds(_) => "bounds",
            Command::Gain(_) => "gain",
            Command::Experiment(_) => "experiment",
            Command::Regress(_) => "regress",
            Command::Conditions(_) => "conditions",
        }
    }
}

fn parse_probs(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

fn parse_grid(s: &str) -> Result<Vec<usize>, String> {
    epicongress::gain::experiment::parse_grid(s).map_err(|e| e.to_string())
}

/// A profile given either explicitly or as a source plus size.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    /// Explicit competences, comma-separated
    // The path is spelled out so clap takes one comma-separated value
    // instead of treating the flag as repeatable.
    #[arg(long, value_parser = parse_probs, conflicts_with_all = ["profile", "n"])]
    pub probs: Option<std::vec::Vec<f64>>,
    /// uniform:lo,hi | beta:a,b | truncnorm:mu,sigma | expuniform
    #[arg(long, requires = "n")]
    #[serde(serialize_with = "display_opt")]
    pub profile: Option<ProfileSource>,
    /// Population size
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PmfArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimalSizeArgs {
    /// uniform:lo,hi | beta:a,b | truncnorm:mu,sigma | expuniform
    #[arg(long, default_value = "expuniform")]
    #[serde(serialize_with = "display")]
    pub profile: ProfileSource,
    /// Population size
    #[arg(long, required_unless_present = "n_grid", conflicts_with = "n_grid")]
    pub n: Option<usize>,
    /// Comma-separated population sizes; emits one row per size
    #[arg(long, value_parser = parse_grid)]
    pub n_grid: Option<std::vec::Vec<usize>>,
    /// Include the full accuracy curve in json output
    #[arg(long)]
    pub curve: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    /// Competence distribution, or expuniform for the deterministic bracket
    #[arg(long)]
    #[serde(serialize_with = "display")]
    pub dist: ProfileSource,
    #[arg(long)]
    pub n: usize,
    /// sqrtlog:a | sqrtloglog:a | const:v | dkw
    #[arg(long, default_value = "dkw")]
    #[serde(serialize_with = "display")]
    pub eps: EpsRule,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GainArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Congress size
    #[arg(long, conflicts_with = "r", required_unless_present = "r")]
    pub k: Option<usize>,
    /// Congress exponent, k = round(n^r)
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExperimentArgs {
    /// key = value config file; flags given here override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated population sizes
    #[arg(long, value_parser = parse_grid)]
    pub n_grid: Option<std::vec::Vec<usize>>,
    /// Congress exponent, k = round(n^r)
    #[arg(long)]
    pub r: Option<f64>,
    /// shifted-uniform:L | dictator-uniform | beta-bias:b | beta-bias-k:g | truncnorm-bias-k:s2 | dist
    #[arg(long)]
    #[serde(serialize_with = "display_opt")]
    pub family: Option<FamilyRule>,
    /// sqrtlog:a | sqrtloglog:a | const:v | dkw
    #[arg(long)]
    #[serde(serialize_with = "display_opt")]
    pub eps: Option<EpsRule>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RegressArgs {
    /// CSV with header country,population,seats (defaults to the bundled snapshot)
    pub data: Option<PathBuf>,
    /// Also predict the congress size for this population
    #[arg(long)]
    pub predict: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremChoice {
    Dictatorship,
    GeneralK,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConditionsArgs {
    #[arg(long, value_enum)]
    pub theorem: TheoremChoice,
    /// dictator-uniform | beta-bias:b | truncnorm-bias-k:s2 | beta-bias-k:g
    #[arg(long)]
    #[serde(serialize_with = "display")]
    pub family: FamilyRule,
    /// Bias constant: eps_n = a sqrt(ln n / n)
    #[arg(long)]
    pub a: f64,
    /// Tail constant (general-k only)
    #[arg(long, required_if_eq("theorem", "general-k"))]
    pub alpha: Option<f64>,
    /// Congress exponent (general-k only)
    #[arg(long, required_if_eq("theorem", "general-k"))]
    pub r: Option<f64>,
    #[arg(long)]
    pub n: usize,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn display_opt<T: std::fmt::Display, S: serde::Serializer>(
    v: &Option<T>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}
