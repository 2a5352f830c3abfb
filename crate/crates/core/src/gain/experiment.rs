//! Gain sweeps over a grid of population sizes.
//!
//! A config is a flat `key = value` file; `#` starts a comment.
//!
//! ```text
//! n_grid = 1000,10000,100000
//! r      = 0.36
//! family = shifted-uniform:0.4
//! eps    = sqrtloglog:0.5
//! trials = 1000
//! seed   = 20240601
//! mode   = exact
//! ```
//!
//! Every grid point reuses the same trial streams, so neighbouring rows are
//! positively correlated and their differences are less noisy than the rows.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use super::rules::{committee_size, EpsRule, FamilyRule};
use super::{simulate, SimulationMode};
use crate::error::{Error, Result};
use crate::DEFAULT_SEED;

/// Column order of the CSV form.
pub const CSV_HEADER: [&str; 8] = [
    "n",
    "eps_n",
    "k",
    "direct_acc",
    "rep_acc",
    "gain",
    "direct_ci",
    "rep_ci",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n_grid: Vec<usize>,
    /// Committee exponent: `k = round(n^r)`.
    pub r: f64,
    pub family: FamilyRule,
    pub eps: EpsRule,
    pub trials: usize,
    pub seed: u64,
    pub mode: SimulationMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_grid: vec![1_000, 3_000, 10_000],
            r: 0.36,
            family: FamilyRule::ShiftedUniform { margin: 0.4 },
            eps: EpsRule::SqrtLog(1.0),
            trials: 1000,
            seed: DEFAULT_SEED,
            mode: SimulationMode::ExactConditional,
        }
    }
}

fn config_error(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        what: "experiment config",
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Parses `1000,10000,...` into a population grid.
pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            // Accept 1e5 style as long as it is an exact integer.
            t.parse::<usize>().or_else(|_| match t.parse::<f64>() {
                Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
                _ => Err(config_error(t, "expected a non-negative integer")),
            })
        })
        .collect()
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::invalid("n_grid must not be empty"));
        }
        if self.n_grid[0] == 0 {
            return Err(Error::invalid("n_grid entries must be at least 1"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("n_grid must be strictly ascending"));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::invalid(format!(
                "r must lie in (0, 1), got {}",
                self.r
            )));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |reason: &str| config_error(value, format!("{key}: {reason}"));
        match key.trim() {
            "n_grid" => self.n_grid = parse_grid(value)?,
            "r" => self.r = value.parse().map_err(|_| bad("expected a number"))?,
            "family" => self.family = value.parse()?,
            "eps" => self.eps = value.parse()?,
            "trials" => self.trials = value.parse().map_err(|_| bad("expected an integer"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("expected an integer"))?,
            "mode" => self.mode = value.parse()?,
            other => return Err(config_error(other, "unknown key")),
        }
        Ok(())
    }

    /// Renders the config in the same `key = value` form it is parsed from.
    pub fn to_kv(&self) -> String {
        let grid: Vec<String> = self.n_grid.iter().map(usize::to_string).collect();
        format!(
            "n_grid = {}\nr = {}\nfamily = {}\neps = {}\ntrials = {}\nseed = {}\nmode = {}\n",
            grid.join(","),
            self.r,
            self.family,
            self.eps,
            self.trials,
            self.seed,
            self.mode
        )
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    /// Starts from [`ExperimentConfig::default`] and applies each line.
    fn from_str(s: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        for line in s.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_error(line, "expected key = value"))?;
            config.set(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_kv())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub eps_n: f64,
    pub k: usize,
    pub direct_acc: f64,
    pub rep_acc: f64,
    pub gain: f64,
    pub direct_ci: f64,
    pub rep_ci: f64,
    /// Half-width of the paired gain interval. Narrower than the two
    /// accuracy intervals combined, since the accuracies are correlated.
    pub gain_ci: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentTable {
    pub config: ExperimentConfig,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(e.into());
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record([
                row.n.to_string(),
                row.eps_n.to_string(),
                row.k.to_string(),
                row.direct_acc.to_string(),
                row.rep_acc.to_string(),
                row.gain.to_string(),
                row.direct_ci.to_string(),
                row.rep_ci.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One grid point.
pub fn experiment_row(config: &ExperimentConfig, n: usize) -> Result<ExperimentRow> {
    let eps_n = config.eps.value(n)?;
    let k = committee_size(n, config.r);
    let dist = config.family.distribution(eps_n, k)?;
    let s = simulate(&dist, n, k, config.trials, config.seed, config.mode)?;
    Ok(ExperimentRow {
        n,
        eps_n,
        k,
        direct_acc: s.direct.mean,
        rep_acc: s.representative.mean,
        gain: s.gain.mean,
        direct_ci: s.direct.ci95_halfwidth,
        rep_ci: s.representative.ci95_halfwidth,
        gain_ci: s.gain.ci95_halfwidth,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentTable> {
    run_experiment_with_progress(config, |_, _| {})
}

/// Like [`run_experiment`], calling `progress(index, row)` after each grid point.
pub fn run_experiment_with_progress(
    config: &ExperimentConfig,
    mut progress: impl FnMut(usize, &ExperimentRow),
) -> Result<ExperimentTable> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for (i, &n) in config.n_grid.iter().enumerate() {
        let row = experiment_row(config, n)?;
        progress(i, &row);
        rows.push(row);
    }
    Ok(ExperimentTable {
        config: config.clone(),
        rows,
    })
}
