//! Population-indexed parameters: bias sequences `eps_n`, committee sizes
//! `k = n^r`, and distribution families whose parameters move with `n`.
//!
//! ```text
//! eps    := "sqrtlog:" a      a * sqrt(ln n / n)
//!         | "sqrtloglog:" a   a * sqrt(ln ln n / n)
//!         | "const:" v        v
//!         | "dkw"             sqrt(ln n / (2 n))
//! family := "shifted-uniform:" L       U(L + eps, 1 - L)
//!         | "dictator-uniform"         U(2 eps, 1)
//!         | "beta-bias:" b             Beta(b + 4 b eps, b)
//!         | "beta-bias-k:" g           Beta(g k + 4 g k eps, g k)
//!         | "truncnorm-bias-k:" s2     N(1/2 + eps, s2 / k) on [0, 1]
//!         | dist                       fixed, ignores eps and k
//! ```
//!
//! All logarithms are natural.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::competence::parse::parse_numbers;
use crate::competence::CompetenceDistribution;
use crate::error::{Error, Result};

fn parse_error(what: &'static str, input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        what,
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// `sqrt(ln n / n)`, the scale every bias rule is measured in.
pub fn log_scale(n: usize) -> f64 {
    let n = n as f64;
    (n.ln() / n).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum EpsRule {
    SqrtLog(f64),
    SqrtLogLog(f64),
    Const(f64),
    Dkw,
}

impl EpsRule {
    pub fn value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("population size must be at least 1"));
        }
        let nf = n as f64;
        match *self {
            EpsRule::SqrtLog(a) => Ok(a * log_scale(n)),
            EpsRule::SqrtLogLog(a) => {
                let ll = nf.ln().ln();
                if !(ll > 0.0) {
                    return Err(Error::invalid(format!(
                        "ln ln n is not positive for n = {n}; sqrtloglog needs n >= 3"
                    )));
                }
                Ok(a * (ll / nf).sqrt())
            }
            EpsRule::Const(v) => Ok(v),
            EpsRule::Dkw => Ok((nf.ln() / (2.0 * nf)).sqrt()),
        }
    }
}

impl FromStr for EpsRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let one = || -> Result<f64> {
            parse_numbers::<1>(s, args)
                .map(|[v]| v)
                .map_err(|_| parse_error("eps rule", s, "expected one number"))
        };
        let rule = match name.trim() {
            "sqrtlog" => EpsRule::SqrtLog(one()?),
            "sqrtloglog" => EpsRule::SqrtLogLog(one()?),
            "const" => EpsRule::Const(one()?),
            "dkw" if args.is_empty() => EpsRule::Dkw,
            // Bare numbers are a convenience for const.
            other => match other.parse::<f64>() {
                Ok(v) if args.is_empty() => EpsRule::Const(v),
                _ => return Err(parse_error("eps rule", s, "unknown rule")),
            },
        };
        let v = match rule {
            EpsRule::SqrtLog(v) | EpsRule::SqrtLogLog(v) | EpsRule::Const(v) => v,
            EpsRule::Dkw => 0.0,
        };
        if !v.is_finite() {
            return Err(parse_error("eps rule", s, "value must be finite"));
        }
        Ok(rule)
    }
}

impl fmt::Display for EpsRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsRule::SqrtLog(a) => write!(f, "sqrtlog:{a}"),
            EpsRule::SqrtLogLog(a) => write!(f, "sqrtloglog:{a}"),
            EpsRule::Const(v) => write!(f, "const:{v}"),
            EpsRule::Dkw => f.write_str("dkw"),
        }
    }
}

/// `round(n^r)`, clamped to `1..=n`.
pub fn committee_size(n: usize, r: f64) -> usize {
    ((n as f64).powf(r).round() as usize).clamp(1, n.max(1))
}

/// A distribution family indexed by the bias `eps_n` and committee size `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyRule {
    /// `U(L + eps, 1 - L)`, mean `1/2 + eps/2`.
    ShiftedUniform {
        margin: f64,
    },
    /// `U(2 eps, 1)`, mean `1/2 + eps`.
    DictatorUniform,
    /// `Beta(b + 4 b eps, b)`, mean close to `1/2 + eps`.
    BetaBias {
        beta: f64,
    },
    /// `Beta(g k + 4 g k eps, g k)`.
    BetaBiasK {
        gamma: f64,
    },
    /// Normal with mean `1/2 + eps` and variance `s2 / k`, conditioned on `[0, 1]`.
    TruncNormBiasK {
        sigma0_sq: f64,
    },
    Fixed {
        dist: CompetenceDistribution,
    },
}

impl FamilyRule {
    pub fn distribution(&self, eps: f64, k: usize) -> Result<CompetenceDistribution> {
        let kf = k.max(1) as f64;
        match *self {
            FamilyRule::ShiftedUniform { margin } => {
                CompetenceDistribution::uniform(margin + eps, 1.0 - margin)
            }
            FamilyRule::DictatorUniform => CompetenceDistribution::uniform(2.0 * eps, 1.0),
            FamilyRule::BetaBias { beta } => {
                CompetenceDistribution::beta(beta + 4.0 * beta * eps, beta)
            }
            FamilyRule::BetaBiasK { gamma } => {
                let b = gamma * kf;
                CompetenceDistribution::beta(b + 4.0 * b * eps, b)
            }
            FamilyRule::TruncNormBiasK { sigma0_sq } => {
                if !(sigma0_sq > 0.0) {
                    return Err(Error::invalid("sigma0^2 must be positive"));
                }
                CompetenceDistribution::truncated_normal(0.5 + eps, (sigma0_sq / kf).sqrt())
            }
            FamilyRule::Fixed { dist } => Ok(dist),
        }
    }
}

impl FromStr for FamilyRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let one = || -> Result<f64> {
            let [v] = parse_numbers::<1>(s, args)
                .map_err(|_| parse_error("family", s, "expected one number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_error("family", s, "parameter must be finite"))
            }
        };
        match name.trim() {
            "shifted-uniform" => Ok(FamilyRule::ShiftedUniform { margin: one()? }),
            "dictator-uniform" if args.is_empty() => Ok(FamilyRule::DictatorUniform),
            "beta-bias" => Ok(FamilyRule::BetaBias { beta: one()? }),
            "beta-bias-k" => Ok(FamilyRule::BetaBiasK { gamma: one()? }),
            "truncnorm-bias-k" => Ok(FamilyRule::TruncNormBiasK { sigma0_sq: one()? }),
            _ => s
                .parse::<CompetenceDistribution>()
                .map(|dist| FamilyRule::Fixed { dist }),
        }
    }
}

impl fmt::Display for FamilyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyRule::ShiftedUniform { margin } => write!(f, "shifted-uniform:{margin}"),
            FamilyRule::DictatorUniform => f.write_str("dictator-uniform"),
            FamilyRule::BetaBias { beta } => write!(f, "beta-bias:{beta}"),
            FamilyRule::BetaBiasK { gamma } => write!(f, "beta-bias-k:{gamma}"),
            FamilyRule::TruncNormBiasK { sigma0_sq } => write!(f, "truncnorm-bias-k:{sigma0_sq}"),
            FamilyRule::Fixed { dist } => dist.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_rules() {
        let n = 10_000;
        let ln = (n as f64).ln();
        assert!((EpsRule::SqrtLog(0.3).value(n).unwrap() - 0.3 * (ln / 1e4).sqrt()).abs() < 1e-15);
        assert!(
            (EpsRule::SqrtLogLog(1.0).value(n).unwrap() - (ln.ln() / 1e4).sqrt()).abs() < 1e-15
        );
        assert_eq!(EpsRule::Const(0.01).value(n).unwrap(), 0.01);
        assert!((EpsRule::Dkw.value(1000).unwrap() - 0.058_769_700_011_92).abs() < 1e-12);
        assert!(EpsRule::SqrtLogLog(1.0).value(2).is_err());
    }

    #[test]
    fn eps_parse_roundtrip() {
        for s in ["sqrtlog:0.5", "sqrtloglog:1", "const:0.02", "dkw"] {
            assert_eq!(s.parse::<EpsRule>().unwrap().to_string(), s);
        }
        assert_eq!("0".parse::<EpsRule>().unwrap(), EpsRule::Const(0.0));
        assert!("sqrtlog".parse::<EpsRule>().is_err());
        assert!("log:1".parse::<EpsRule>().is_err());
    }

    #[test]
    fn family_parse_roundtrip() {
        for s in [
            "shifted-uniform:0.4",
            "dictator-uniform",
            "beta-bias:2",
            "beta-bias-k:8.5",
            "truncnorm-bias-k:0.5",
            "uniform:0.1,0.9",
        ] {
            assert_eq!(s.parse::<FamilyRule>().unwrap().to_string(), s);
        }
        assert!("shifted-uniform".parse::<FamilyRule>().is_err());
    }

    #[test]
    fn family_distributions() {
        let d = FamilyRule::ShiftedUniform { margin: 0.4 }
            .distribution(0.05, 10)
            .unwrap();
        assert_eq!(d, CompetenceDistribution::Uniform { lo: 0.45, hi: 0.6 });
        assert!(FamilyRule::ShiftedUniform { margin: 0.4 }
            .distribution(0.3, 10)
            .is_err());
        let d = FamilyRule::BetaBiasK { gamma: 2.0 }
            .distribution(0.01, 10)
            .unwrap();
        let CompetenceDistribution::Beta { alpha, beta } = d else {
            panic!("{d:?}")
        };
        assert!((alpha - 20.8).abs() < 1e-12 && beta == 20.0);
    }

    #[test]
    fn committee_rounding() {
        assert_eq!(committee_size(100_000, 0.36), 63);
        assert_eq!(committee_size(1, 0.36), 1);
        assert_eq!(committee_size(1000, 0.36), 12);
    }
}
