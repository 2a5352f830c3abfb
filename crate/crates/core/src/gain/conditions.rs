//! Finite-`n` evaluation of the sufficient conditions for the sign of the gain.
//!
//! The sign theorems are stated for "some constant `a`" with the mean pinned
//! to `1/2 + a sqrt(ln n / n)`. The preset families only hit that mean
//! approximately, so every inequality involving `a` is evaluated at the
//! implied constant `a_eff = (E[p] - 1/2) / sqrt(ln n / n)`, and the mean
//! hypothesis itself reduces to `a_eff > 0`. The user's `a` only sets the
//! family's bias `eps_n = a sqrt(ln n / n)`.
//!
//! Asymptotic slacks are fixed: `Omega(1)` is [`OMEGA_SLACK`] and density
//! conditions are checked on `[1 - DENSITY_WINDOW, 1]`.

use serde::Serialize;

use super::rules::{committee_size, log_scale, FamilyRule};
use crate::competence::special::ln_beta;
use crate::competence::{CompetenceDistribution, DistStats};
use crate::error::{Error, Result};

/// Value used for every `Omega(1)` slack.
pub const OMEGA_SLACK: f64 = 0.1;

/// Width of the window below 1 on which density shapes are checked.
pub const DENSITY_WINDOW: f64 = 0.1;

const DENSITY_GRID: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    DictatorshipPositive,
    DictatorshipNegative,
    GeneralKPositive,
    GeneralKNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictedSign {
    Positive,
    Negative,
    NotApplicable,
}

impl std::fmt::Display for PredictedSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PredictedSign::Positive => "positive",
            PredictedSign::Negative => "negative",
            PredictedSign::NotApplicable => "not_applicable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: &'static str,
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl Hypothesis {
    fn less(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Hypothesis {
            name,
            satisfied: lhs < rhs,
            lhs,
            rhs,
        }
    }

    fn greater(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Hypothesis {
            name,
            satisfied: lhs > rhs,
            lhs,
            rhs,
        }
    }

    fn at_most(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Hypothesis {
            name,
            satisfied: lhs <= rhs,
            lhs,
            rhs,
        }
    }

    fn at_least(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Hypothesis {
            name,
            satisfied: lhs >= rhs,
            lhs,
            rhs,
        }
    }
}

/// One branch of a sign theorem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVerdict {
    pub theorem: Theorem,
    pub hypotheses: Vec<Hypothesis>,
    /// The branch's sign if every hypothesis holds, otherwise not applicable.
    pub predicted_sign: PredictedSign,
}

impl ConditionVerdict {
    fn new(theorem: Theorem, hypotheses: Vec<Hypothesis>) -> Self {
        let sign = match theorem {
            Theorem::DictatorshipPositive | Theorem::GeneralKPositive => PredictedSign::Positive,
            Theorem::DictatorshipNegative | Theorem::GeneralKNegative => PredictedSign::Negative,
        };
        let predicted_sign = if hypotheses.iter().all(|h| h.satisfied) {
            sign
        } else {
            PredictedSign::NotApplicable
        };
        ConditionVerdict {
            theorem,
            hypotheses,
            predicted_sign,
        }
    }
}

/// Both branches of a sign theorem evaluated for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub a: f64,
    /// `(E[p] - 1/2) / sqrt(ln n / n)`.
    pub a_eff: f64,
    pub eps_n: f64,
    pub stats: DistStats,
    pub positive: ConditionVerdict,
    pub negative: ConditionVerdict,
    /// The sign of whichever branch applies; not applicable if neither or both do.
    pub predicted_sign: PredictedSign,
}

fn overall(positive: &ConditionVerdict, negative: &ConditionVerdict) -> PredictedSign {
    match (positive.predicted_sign, negative.predicted_sign) {
        (PredictedSign::Positive, PredictedSign::NotApplicable) => PredictedSign::Positive,
        (PredictedSign::NotApplicable, PredictedSign::Negative) => PredictedSign::Negative,
        _ => PredictedSign::NotApplicable,
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::invalid(format!(
            "population size must be at least 3, got {n}"
        )));
    }
    Ok(())
}

/// Density-shape constants near 1: the lower envelope `C (1-x)^(b-1)` and
/// the upper bound, together with what the density actually achieves.
struct DensityShape {
    beta_lower: f64,
    c_lower: f64,
    c_upper: f64,
    /// `inf f(x) / (1-x)^(b-1)` on the window.
    envelope_inf: f64,
    /// `sup f(x)` on the window.
    density_sup: f64,
}

fn beta_window_sup(alpha: f64, beta: f64) -> f64 {
    if beta < 1.0 {
        return f64::INFINITY;
    }
    let ln_b = ln_beta(alpha, beta);
    (0..=DENSITY_GRID)
        .map(|i| {
            let x = 1.0 - DENSITY_WINDOW * i as f64 / DENSITY_GRID as f64;
            ((alpha - 1.0) * x.ln() + (beta - 1.0) * (1.0 - x).ln() - ln_b).exp()
        })
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max)
}

fn density_shape(family: &FamilyRule, dist: &CompetenceDistribution) -> Result<DensityShape> {
    match (*family, *dist) {
        // U(2 eps, 1): C_lower = 1, C_upper = 2 with shape exponent 1.
        (FamilyRule::DictatorUniform, CompetenceDistribution::Uniform { lo, hi }) => {
            let f = if lo < 1.0 - DENSITY_WINDOW {
                1.0 / (hi - lo)
            } else {
                0.0
            };
            Ok(DensityShape {
                beta_lower: 1.0,
                c_lower: 1.0,
                c_upper: 2.0,
                envelope_inf: f,
                density_sup: f,
            })
        }
        // Beta(alpha, b): f(x) / (1-x)^(b-1) = x^(alpha-1) / B(alpha, b). The
        // constants are the unbiased Beta(b, b) values with a factor-2 margin.
        (FamilyRule::BetaBias { beta: b }, CompetenceDistribution::Beta { alpha, beta }) => {
            let envelope = |a: f64, bb: f64| {
                (1.0 - DENSITY_WINDOW).powf(a - 1.0).min(1.0) * (-ln_beta(a, bb)).exp()
            };
            Ok(DensityShape {
                beta_lower: b,
                c_lower: 0.5 * envelope(b, b),
                c_upper: 2.0 * beta_window_sup(b, b),
                envelope_inf: envelope(alpha, beta),
                density_sup: beta_window_sup(alpha, beta),
            })
        }
        _ => Err(Error::invalid(format!(
            "no analytic density constants for family {family}; \
             dictatorship checks support dictator-uniform and beta-bias:b"
        ))),
    }
}

/// Sufficient conditions for the sign of the gain of a one-member congress.
pub fn dictatorship_condition(family: &FamilyRule, a: f64, n: usize) -> Result<ConditionReport> {
    check_positive("a", a)?;
    check_n(n)?;
    let scale = log_scale(n);
    let eps_n = a * scale;
    let dist = family.distribution(eps_n, 1)?;
    let shape = density_shape(family, &dist)?;
    let stats = dist.stats()?;
    let a_eff = (stats.mean - 0.5) / scale;
    let mean_bias = Hypothesis::greater("mean_above_half", stats.mean - 0.5, 0.0);

    let positive = ConditionVerdict::new(
        Theorem::DictatorshipPositive,
        vec![
            mean_bias.clone(),
            Hypothesis::at_least("density_lower_envelope", shape.envelope_inf, shape.c_lower),
            Hypothesis::less(
                "a_below_spread",
                a_eff,
                (stats.mean_p1mp * (2.0 / shape.beta_lower).min(1.0)).sqrt(),
            ),
        ],
    );
    let negative = ConditionVerdict::new(
        Theorem::DictatorshipNegative,
        vec![
            mean_bias,
            // Compared as reciprocals so an unbounded density reports 0
            // instead of an infinity, and fails.
            Hypothesis {
                name: "inverse_density_sup",
                satisfied: shape.density_sup.is_finite()
                    && shape.c_upper.is_finite()
                    && shape.density_sup <= shape.c_upper,
                lhs: 1.0 / shape.density_sup,
                rhs: 1.0 / shape.c_upper,
            },
            Hypothesis::greater("a_above_inv_sqrt2", a_eff, std::f64::consts::FRAC_1_SQRT_2),
        ],
    );
    Ok(ConditionReport {
        family: family.to_string(),
        n,
        k: 1,
        a,
        a_eff,
        eps_n,
        stats,
        predicted_sign: overall(&positive, &negative),
        positive,
        negative,
    })
}

/// Sufficient conditions for the sign of the gain of a congress of size
/// `round(n^r)`.
pub fn general_k_condition(
    family: &FamilyRule,
    a: f64,
    alpha: f64,
    r: f64,
    n: usize,
) -> Result<ConditionReport> {
    check_positive("a", a)?;
    check_positive("alpha", alpha)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid(format!("r must lie in (0, 1), got {r}")));
    }
    check_n(n)?;
    // Preset sufficient conditions on the family's shape parameter.
    let min_slack = (1.0 - r).min(0.5);
    let (pos_preset, neg_preset) = match *family {
        FamilyRule::TruncNormBiasK { sigma0_sq } => (
            Hypothesis::greater(
                "sigma0_sq_above",
                sigma0_sq,
                r * alpha * alpha / (2.0 * min_slack),
            ),
            Hypothesis::less(
                "sigma0_sq_below",
                sigma0_sq,
                r * alpha * alpha / (2.0 * (1.0 + OMEGA_SLACK)),
            ),
        ),
        FamilyRule::BetaBiasK { gamma } => (
            Hypothesis::less(
                "gamma_below",
                gamma,
                (0.5 / r - 1.0) / (4.0 * alpha * alpha),
            ),
            Hypothesis::greater(
                "gamma_above",
                gamma,
                ((1.0 + OMEGA_SLACK) / r + 1.0) / (4.0 * alpha * alpha),
            ),
        ),
        _ => {
            return Err(Error::invalid(format!(
                "no preset conditions for family {family}; \
                 general-k checks support truncnorm-bias-k:s2 and beta-bias-k:g"
            )))
        }
    };

    let scale = log_scale(n);
    let eps_n = a * scale;
    let k = committee_size(n, r);
    let dist = family.distribution(eps_n, k)?;
    let stats = dist.stats()?;
    let a_eff = (stats.mean - 0.5) / scale;
    let kf = k as f64;
    let nf = n as f64;
    let tail = dist.sf(0.5 + alpha * (kf.ln() / kf).sqrt());
    let mean_bias = Hypothesis::greater("mean_above_half", stats.mean - 0.5, 0.0);

    let mut positive = vec![
        mean_bias.clone(),
        Hypothesis::at_least("upper_tail_heavy", tail, kf / nf + OMEGA_SLACK * scale),
        Hypothesis::less("a_below_spread", a_eff, stats.mean_p1mp.sqrt()),
        Hypothesis::greater(
            "alpha_above",
            alpha,
            a_eff / (2.0 * (r * stats.mean_p1mp).sqrt()),
        ),
        pos_preset,
    ];
    let mut negative = vec![
        mean_bias,
        Hypothesis::at_most("upper_tail_light", tail, nf.powf(-(1.0 + OMEGA_SLACK))),
        Hypothesis::less("alpha_below_half", alpha, 0.5),
        Hypothesis::greater("a_above", a_eff, r.sqrt() * alpha),
        neg_preset,
    ];
    if let FamilyRule::BetaBiasK { .. } = family {
        let gate = Hypothesis::less("r_below_half", r, 0.5);
        positive.push(gate.clone());
        negative.push(gate);
    }

    let positive = ConditionVerdict::new(Theorem::GeneralKPositive, positive);
    let negative = ConditionVerdict::new(Theorem::GeneralKNegative, negative);
    Ok(ConditionReport {
        family: family.to_string(),
        n,
        k,
        a,
        a_eff,
        eps_n,
        stats,
        predicted_sign: overall(&positive, &negative),
        positive,
        negative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dictator_uniform_branches() {
        let f = FamilyRule::DictatorUniform;
        let r = dictatorship_condition(&f, 0.3, 10_000).unwrap();
        assert_eq!(r.predicted_sign, PredictedSign::Positive);
        assert!((r.a_eff - 0.3).abs() < 1e-9);
        assert_eq!(r.negative.predicted_sign, PredictedSign::NotApplicable);

        let r = dictatorship_condition(&f, 1.0, 10_000).unwrap();
        assert_eq!(r.predicted_sign, PredictedSign::Negative);
        assert_eq!(r.positive.predicted_sign, PredictedSign::NotApplicable);

        let r = dictatorship_condition(&f, 0.5, 10_000).unwrap();
        assert_eq!(r.predicted_sign, PredictedSign::NotApplicable);
        assert_eq!(r.positive.predicted_sign, PredictedSign::NotApplicable);
        assert_eq!(r.negative.predicted_sign, PredictedSign::NotApplicable);
    }

    #[test]
    fn uniform_threshold_near_sqrt_sixth() {
        let f = FamilyRule::DictatorUniform;
        let r = dictatorship_condition(&f, 0.3, 1_000_000).unwrap();
        let h = r
            .positive
            .hypotheses
            .iter()
            .find(|h| h.name == "a_below_spread")
            .unwrap();
        assert!((h.rhs - (1.0f64 / 6.0).sqrt()).abs() < 0.01, "{}", h.rhs);
    }

    #[test]
    fn beta_bias_dictator() {
        let f = FamilyRule::BetaBias { beta: 2.0 };
        let r = dictatorship_condition(&f, 0.2, 10_000).unwrap();
        assert_eq!(r.predicted_sign, PredictedSign::Positive);
        let r = dictatorship_condition(&f, 1.5, 10_000).unwrap();
        assert_eq!(r.predicted_sign, PredictedSign::Negative);
        // An unbounded density near 1 rules out the negative branch.
        let f = FamilyRule::BetaBias { beta: 0.5 };
        let r = dictatorship_condition(&f, 1.5, 10_000).unwrap();
        assert_eq!(r.negative.predicted_sign, PredictedSign::NotApplicable);
    }

    #[test]
    fn unsupported_families() {
        let f: FamilyRule = "shifted-uniform:0.4".parse().unwrap();
        assert!(dictatorship_condition(&f, 0.3, 10_000).is_err());
        assert!(general_k_condition(&f, 0.3, 0.3, 0.36, 10_000).is_err());
        let f = FamilyRule::DictatorUniform;
        assert!(general_k_condition(&f, 0.3, 0.3, 0.36, 10_000).is_err());
    }

    #[test]
    fn verdict_sign_iff_all_hold() {
        let f = FamilyRule::TruncNormBiasK { sigma0_sq: 0.5 };
        for (a, alpha) in [(0.1, 0.3), (0.3, 0.45), (0.1, 0.6)] {
            let r = general_k_condition(&f, a, alpha, 0.36, 1_000_000).unwrap();
            for v in [&r.positive, &r.negative] {
                let all = v.hypotheses.iter().all(|h| h.satisfied);
                assert_eq!(v.predicted_sign != PredictedSign::NotApplicable, all);
            }
        }
    }

    #[test]
    fn truncnorm_positive() {
        let f = FamilyRule::TruncNormBiasK { sigma0_sq: 0.5 };
        let r = general_k_condition(&f, 0.1, 0.3, 0.36, 1_000_000).unwrap();
        assert_eq!(r.k, 145);
        assert_eq!(r.predicted_sign, PredictedSign::Positive, "{r:#?}");
    }

    #[test]
    fn beta_k_negative() {
        let f = FamilyRule::BetaBiasK { gamma: 8.5 };
        let r = general_k_condition(&f, 0.5, 0.45, 0.2, 1_000_000).unwrap();
        assert_eq!(r.k, 16);
        assert_eq!(r.predicted_sign, PredictedSign::Negative, "{r:#?}");
    }

    #[test]
    fn alpha_half_blocks_negative() {
        let f = FamilyRule::BetaBiasK { gamma: 8.5 };
        let r = general_k_condition(&f, 0.5, 0.5, 0.2, 1_000_000).unwrap();
        assert_eq!(r.negative.predicted_sign, PredictedSign::NotApplicable);
        let h = r
            .negative
            .hypotheses
            .iter()
            .find(|h| h.name == "alpha_below_half")
            .unwrap();
        assert!(!h.satisfied);
    }

    #[test]
    fn bad_parameters() {
        let f = FamilyRule::TruncNormBiasK { sigma0_sq: 0.5 };
        assert!(general_k_condition(&f, 0.1, 0.3, 1.0, 10_000).is_err());
        assert!(general_k_condition(&f, 0.1, 0.3, 0.0, 10_000).is_err());
        assert!(general_k_condition(&f, -0.1, 0.3, 0.3, 10_000).is_err());
        assert!(dictatorship_condition(&FamilyRule::DictatorUniform, 0.3, 2).is_err());
    }
}
