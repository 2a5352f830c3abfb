//! Gain of a top-`k` congress over direct democracy.
//!
//! `gain(k) = Pr[top-k majority correct] - Pr[all-n majority correct]`, both
//! under the strict-majority rule. It is computed as the difference of the two
//! failure probabilities so that it stays accurate when both accuracies are
//! within rounding of one.

pub mod conditions;
pub mod experiment;
pub mod rules;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::competence::{sample_profile_with, CompetenceDistribution, CompetenceProfile};
use crate::error::{Error, Result};
use crate::poisson_binomial::{TruncatedPmf, DEFAULT_NEGLIGIBLE_MASS};
use crate::rng::{self, StreamRng};

pub use conditions::{
    dictatorship_condition, general_k_condition, ConditionReport, ConditionVerdict, Hypothesis,
    PredictedSign, Theorem,
};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentRow, ExperimentTable};
pub use rules::{committee_size, EpsRule, FamilyRule};

/// Populations up to this size use the untruncated DP.
pub const EXACT_DP_LIMIT: usize = 4096;

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GainMethod {
    /// Exact gain of one fixed profile.
    Exact,
    /// Profiles sampled, conditional accuracies computed exactly per profile.
    ExactConditional,
    /// Profiles and votes both sampled.
    VoteSampling,
}

/// How each Monte Carlo trial is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMode {
    ExactConditional,
    VoteSampling,
}

impl std::str::FromStr for SimulationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" | "exact_conditional" => Ok(SimulationMode::ExactConditional),
            "votes" | "vote_sampling" => Ok(SimulationMode::VoteSampling),
            other => Err(Error::Parse {
                what: "mode",
                input: other.to_string(),
                reason: "expected exact or votes".into(),
            }),
        }
    }
}

impl std::fmt::Display for SimulationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SimulationMode::ExactConditional => "exact",
            SimulationMode::VoteSampling => "votes",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainEstimate {
    pub value: f64,
    pub method: GainMethod,
    /// Zero for [`GainMethod::Exact`].
    pub trials: usize,
    pub ci95_halfwidth: f64,
}

/// Sample mean with a normal-approximation 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_dev: f64,
    pub ci95_halfwidth: f64,
}

impl MeanEstimate {
    fn from_samples(xs: impl Iterator<Item = f64> + Clone) -> Self {
        let (count, sum) = xs.clone().fold((0usize, 0.0), |(c, s), x| (c + 1, s + x));
        let mean = sum / count as f64;
        let std_dev = if count > 1 {
            let ss: f64 = xs.map(|x| (x - mean) * (x - mean)).sum();
            (ss / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        MeanEstimate {
            mean,
            std_dev,
            ci95_halfwidth: Z95 * std_dev / (count as f64).sqrt(),
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.ci95_halfwidth / Z95
    }
}

/// Per-trial accuracy estimates for direct democracy, the congress, and
/// their paired difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub mode: SimulationMode,
    pub direct: MeanEstimate,
    pub representative: MeanEstimate,
    pub gain: MeanEstimate,
}

impl MonteCarloSummary {
    pub fn estimate(&self) -> GainEstimate {
        GainEstimate {
            value: self.gain.mean,
            method: match self.mode {
                SimulationMode::ExactConditional => GainMethod::ExactConditional,
                SimulationMode::VoteSampling => GainMethod::VoteSampling,
            },
            trials: self.trials,
            ci95_halfwidth: self.gain.ci95_halfwidth,
        }
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "committee size k = {k} must be in 1..={n}"
        )));
    }
    Ok(())
}

/// Failure probabilities `(top k, all n)` from one DP pass.
fn failure_pair(profile: &[f64], k: usize) -> Result<(f64, f64)> {
    let floor = if profile.len() <= EXACT_DP_LIMIT {
        0.0
    } else {
        DEFAULT_NEGLIGIBLE_MASS
    };
    let mut dp = TruncatedPmf::new(floor);
    let mut top = 0.0;
    for (i, &p) in profile.iter().enumerate() {
        dp.push(p)?;
        if i + 1 == k {
            top = dp.failure_prob();
        }
    }
    Ok((top, dp.failure_prob()))
}

/// Exact gain of the top-`k` congress for one profile.
pub fn gain_exact(profile: &CompetenceProfile, k: usize) -> Result<GainEstimate> {
    check_k(profile.n(), k)?;
    let (top, all) = failure_pair(profile.probs(), k)?;
    Ok(GainEstimate {
        value: all - top,
        method: GainMethod::Exact,
        trials: 0,
        ci95_halfwidth: 0.0,
    })
}

/// Generator for Monte Carlo trial `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> StreamRng {
    rng::substream(seed, rng::domain::TRIAL, trial)
}

/// `(direct_acc, rep_acc, gain)` of one trial.
fn run_trial(
    dist: &CompetenceDistribution,
    n: usize,
    k: usize,
    mode: SimulationMode,
    rng: &mut StreamRng,
) -> Result<(f64, f64, f64)> {
    let profile = sample_profile_with(dist, n, rng)?;
    match mode {
        SimulationMode::ExactConditional => {
            let (top, all) = failure_pair(profile.probs(), k)?;
            Ok((1.0 - all, 1.0 - top, all - top))
        }
        SimulationMode::VoteSampling => {
            let mut correct_top = 0usize;
            let mut correct_all = 0usize;
            for (i, &p) in profile.probs().iter().enumerate() {
                if rng.random::<f64>() < p {
                    correct_all += 1;
                    if i < k {
                        correct_top += 1;
                    }
                }
            }
            let direct = f64::from(u8::from(2 * correct_all > n));
            let rep = f64::from(u8::from(2 * correct_top > k));
            Ok((direct, rep, rep - direct))
        }
    }
}

/// Monte Carlo over competence profiles drawn from `dist`.
///
/// Trial `t` uses its own stream derived from `(seed, t)`, and per-trial
/// results are reduced in trial order, so the summary is bit-identical no
/// matter how the trials are scheduled.
pub fn simulate(
    dist: &CompetenceDistribution,
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
    mode: SimulationMode,
) -> Result<MonteCarloSummary> {
    check_k(n, k)?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let results = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(dist, n, k, mode, &mut trial_rng(seed, t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonteCarloSummary {
        n,
        k,
        trials,
        mode,
        direct: MeanEstimate::from_samples(results.iter().map(|r| r.0)),
        representative: MeanEstimate::from_samples(results.iter().map(|r| r.1)),
        gain: MeanEstimate::from_samples(results.iter().map(|r| r.2)),
    })
}

/// Monte Carlo estimate of the expected gain over profiles drawn from `dist`.
pub fn gain_monte_carlo(
    dist: &CompetenceDistribution,
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
    mode: SimulationMode,
) -> Result<GainEstimate> {
    simulate(dist, n, k, trials, seed, mode).map(|s| s.estimate())
}

/// Exact gain of every trial's profile, in trial order. Used for sign checks
/// where the distribution of per-profile gains matters, not only its mean.
pub fn per_profile_gains(
    dist: &CompetenceDistribution,
    n: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_k(n, k)?;
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            run_trial(
                dist,
                n,
                k,
                SimulationMode::ExactConditional,
                &mut trial_rng(seed, t),
            )
            .map(|r| r.2)
        })
        .collect()
}
