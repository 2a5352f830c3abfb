//! Text forms of distributions and profile sources.
//!
//! ```text
//! dist    := "uniform:" lo "," hi
//!          | "beta:" alpha "," beta
//!          | "truncnorm:" mu "," sigma
//! profile := dist | "expuniform"
//! ```
//!
//! Numbers use Rust's `f64` syntax. Whitespace around tokens is ignored.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{expected_uniform_profile, sample_profile, CompetenceDistribution, CompetenceProfile};
use crate::error::{Error, Result};

fn parse_error(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        what: "distribution spec",
        input: input.to_string(),
        reason: reason.into(),
    }
}

pub(crate) fn parse_numbers<const N: usize>(input: &str, args: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(parse_error(
            input,
            format!(
                "expected {N} comma-separated numbers, found {}",
                parts.len()
            ),
        ));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .parse::<f64>()
            .map_err(|e| parse_error(input, format!("{part:?}: {e}")))?;
    }
    Ok(out)
}

impl FromStr for CompetenceDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, args) = s.split_once(':').unwrap_or((s, ""));
        match family.trim() {
            "uniform" => {
                let [lo, hi] = parse_numbers(s, args)?;
                CompetenceDistribution::uniform(lo, hi)
            }
            "beta" => {
                let [a, b] = parse_numbers(s, args)?;
                CompetenceDistribution::beta(a, b)
            }
            "truncnorm" => {
                let [mu, sigma] = parse_numbers(s, args)?;
                CompetenceDistribution::truncated_normal(mu, sigma)
            }
            "expuniform" => Err(parse_error(
                s,
                "expuniform is a deterministic profile, not a sampling distribution",
            )),
            other => Err(parse_error(s, format!("unknown family {other:?}"))),
        }
    }
}

impl fmt::Display for CompetenceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompetenceDistribution::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            CompetenceDistribution::Beta { alpha, beta } => write!(f, "beta:{alpha},{beta}"),
            CompetenceDistribution::TruncatedNormal { mu, sigma } => {
                write!(f, "truncnorm:{mu},{sigma}")
            }
        }
    }
}

/// Where a competence profile comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    Sampled(CompetenceDistribution),
    ExpectedUniform,
}

impl ProfileSource {
    /// Builds the profile for population `n`; `seed` is ignored for
    /// deterministic sources.
    pub fn profile(&self, n: usize, seed: u64) -> Result<CompetenceProfile> {
        match self {
            ProfileSource::Sampled(dist) => sample_profile(dist, n, seed),
            ProfileSource::ExpectedUniform => expected_uniform_profile(n),
        }
    }
}

impl FromStr for ProfileSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "expuniform" {
            Ok(ProfileSource::ExpectedUniform)
        } else {
            s.parse().map(ProfileSource::Sampled)
        }
    }
}

impl fmt::Display for ProfileSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSource::Sampled(d) => d.fmt(f),
            ProfileSource::ExpectedUniform => f.write_str("expuniform"),
        }
    }
}
