//! Competence distributions, sorted competence profiles, and DKW checks.
//!
//! Every family samples by inverting its CDF on a single uniform stream, so
//! a given `(seed, n)` drives all families through the same uniforms.

pub(crate) mod parse;
pub mod special;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poisson_binomial::checked_prob;
use crate::quadrature;
use crate::rng::{self, StreamRng};

pub use parse::ProfileSource;

use special::{beta_reg, beta_reg_upper, ln_beta, norm_cdf, norm_pdf, norm_sf};

/// Grid resolution for the density infimum search.
const LIPSCHITZ_GRID: usize = 10_000;
/// Densities at or below this are treated as zero.
const DENSITY_FLOOR: f64 = 1e-12;
/// Tolerance for moments obtained by quadrature.
const MOMENT_TOL: f64 = 1e-10;

/// A competence distribution supported inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CompetenceDistribution {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Beta {
        alpha: f64,
        beta: f64,
    },
    /// Normal(mu, sigma^2) conditioned on `[0, 1]`.
    TruncatedNormal {
        mu: f64,
        sigma: f64,
    },
}

/// `(E[p], E[p(1-p)])` of a competence distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistStats {
    pub mean: f64,
    pub mean_p1mp: f64,
}

impl CompetenceDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi > 1.0 || lo >= hi {
            return Err(Error::invalid(format!(
                "uniform support must satisfy 0 <= lo < hi <= 1, got [{lo}, {hi}]"
            )));
        }
        Ok(CompetenceDistribution::Uniform { lo, hi })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) || alpha <= 0.0 || beta <= 0.0 {
            return Err(Error::invalid(format!(
                "beta parameters must be positive, got ({alpha}, {beta})"
            )));
        }
        Ok(CompetenceDistribution::Beta { alpha, beta })
    }

    pub fn truncated_normal(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu.is_finite() && sigma.is_finite()) || sigma <= 0.0 {
            return Err(Error::invalid(format!(
                "truncated normal needs finite mu and sigma > 0, got ({mu}, {sigma})"
            )));
        }
        let d = CompetenceDistribution::TruncatedNormal { mu, sigma };
        if d.normal_mass(0.0, 1.0) <= 0.0 {
            return Err(Error::invalid(format!(
                "normal({mu}, {sigma}) has no representable mass on [0, 1]"
            )));
        }
        Ok(d)
    }

    /// Closed support interval `[L, H]`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            CompetenceDistribution::Uniform { lo, hi } => (lo, hi),
            _ => (0.0, 1.0),
        }
    }

    // Mass of the untruncated normal on [u, v], computed on the side of the
    // mean that avoids cancellation.
    fn normal_mass(&self, u: f64, v: f64) -> f64 {
        let CompetenceDistribution::TruncatedNormal { mu, sigma } = *self else {
            unreachable!("normal_mass on a non-normal family")
        };
        let (zu, zv) = ((u - mu) / sigma, (v - mu) / sigma);
        if zu >= 0.0 {
            norm_sf(zu) - norm_sf(zv)
        } else if zv <= 0.0 {
            norm_cdf(zv) - norm_cdf(zu)
        } else {
            1.0 - norm_cdf(zu) - norm_sf(zv)
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        match *self {
            CompetenceDistribution::Uniform { lo, hi } => 1.0 / (hi - lo),
            CompetenceDistribution::Beta { alpha, beta } => {
                let edge = |shape: f64| {
                    if shape < 1.0 {
                        f64::INFINITY
                    } else if shape > 1.0 {
                        0.0
                    } else {
                        f64::NAN
                    }
                };
                if x == 0.0 && alpha != 1.0 {
                    return edge(alpha);
                }
                if x == 1.0 && beta != 1.0 {
                    return edge(beta);
                }
                let log_x = if alpha == 1.0 {
                    0.0
                } else {
                    (alpha - 1.0) * x.ln()
                };
                let log_1mx = if beta == 1.0 {
                    0.0
                } else {
                    (beta - 1.0) * (1.0 - x).ln()
                };
                (log_x + log_1mx - ln_beta(alpha, beta)).exp()
            }
            CompetenceDistribution::TruncatedNormal { mu, sigma } => {
                norm_pdf((x - mu) / sigma) / (sigma * self.normal_mass(0.0, 1.0))
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        match *self {
            CompetenceDistribution::Uniform { lo, hi } => (x - lo) / (hi - lo),
            CompetenceDistribution::Beta { alpha, beta } => {
                beta_reg(alpha, beta, x).unwrap_or(f64::NAN)
            }
            CompetenceDistribution::TruncatedNormal { .. } => {
                (self.normal_mass(0.0, x) / self.normal_mass(0.0, 1.0)).clamp(0.0, 1.0)
            }
        }
    }

    /// `1 - cdf(x)`, accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 1.0;
        }
        if x >= hi {
            return 0.0;
        }
        match *self {
            CompetenceDistribution::Uniform { lo, hi } => (hi - x) / (hi - lo),
            CompetenceDistribution::Beta { alpha, beta } => {
                beta_reg_upper(alpha, beta, x).unwrap_or(f64::NAN)
            }
            CompetenceDistribution::TruncatedNormal { .. } => {
                (self.normal_mass(x, 1.0) / self.normal_mass(0.0, 1.0)).clamp(0.0, 1.0)
            }
        }
    }

    /// Inverse CDF. `u` is clamped to `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let (lo, hi) = self.support();
        let u = u.clamp(0.0, 1.0);
        if let CompetenceDistribution::Uniform { lo, hi } = *self {
            return (lo + u * (hi - lo)).clamp(lo, hi);
        }
        if u == 0.0 {
            return lo;
        }
        if u == 1.0 {
            return hi;
        }
        // Bisection; the upper half is searched through the survival
        // function so tail quantiles do not lose digits.
        let upper = u > 0.5;
        let target = if upper { 1.0 - u } else { u };
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let below = if upper {
                self.sf(mid) > target
            } else {
                self.cdf(mid) < target
            };
            if below {
                a = mid;
            } else {
                b = mid;
            }
            if b - a <= 1e-15 {
                break;
            }
        }
        0.5 * (a + b)
    }

    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    pub fn stats(&self) -> Result<DistStats> {
        match *self {
            CompetenceDistribution::Uniform { lo, hi } => {
                let mean = 0.5 * (lo + hi);
                let second = (lo * lo + lo * hi + hi * hi) / 3.0;
                Ok(DistStats {
                    mean,
                    mean_p1mp: mean - second,
                })
            }
            CompetenceDistribution::Beta { alpha, beta } => {
                let s = alpha + beta;
                Ok(DistStats {
                    mean: alpha / s,
                    mean_p1mp: alpha * beta / (s * (s + 1.0)),
                })
            }
            CompetenceDistribution::TruncatedNormal { mu, sigma } => {
                let centre = mu.clamp(0.0, 1.0);
                let a = (centre - 12.0 * sigma).max(0.0);
                let b = (centre + 12.0 * sigma).min(1.0);
                let mass = quadrature::integrate(|x| self.pdf(x), a, b, MOMENT_TOL)?;
                let first = quadrature::integrate(|x| x * self.pdf(x), a, b, MOMENT_TOL)?;
                let p1mp =
                    quadrature::integrate(|x| x * (1.0 - x) * self.pdf(x), a, b, MOMENT_TOL)?;
                if (mass - 1.0).abs() > 1e-8 {
                    return Err(Error::Numerical(format!(
                        "truncated normal density integrates to {mass}"
                    )));
                }
                Ok(DistStats {
                    mean: first / mass,
                    mean_p1mp: p1mp / mass,
                })
            }
        }
    }

    /// Lipschitz constant of the quantile function, `1 / inf pdf` on the support.
    pub fn quantile_lipschitz_constant(&self) -> Result<f64> {
        if let CompetenceDistribution::Uniform { lo, hi } = *self {
            return Ok(hi - lo);
        }
        let (lo, hi) = self.support();
        let step = (hi - lo) / LIPSCHITZ_GRID as f64;
        let density = |x: f64| {
            let d = self.pdf(x);
            if d.is_nan() {
                // Only reachable at an endpoint with a unit shape parameter,
                // where the density is finite; approach it from inside.
                self.pdf(x + if x <= lo { 1e-12 } else { -1e-12 })
            } else {
                d
            }
        };
        let (mut arg, mut infimum) = (0, f64::INFINITY);
        for i in 0..=LIPSCHITZ_GRID {
            let d = density(lo + step * i as f64);
            if d < infimum {
                infimum = d;
                arg = i;
            }
        }
        // Golden-section refinement inside the bracketing grid cells.
        let mut a = lo + step * arg.saturating_sub(1) as f64;
        let mut b = (lo + step * (arg + 1) as f64).min(hi);
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let x1 = b - ratio * (b - a);
            let x2 = a + ratio * (b - a);
            if density(x1) < density(x2) {
                b = x2;
            } else {
                a = x1;
            }
            if b - a < 1e-14 {
                break;
            }
        }
        infimum = infimum.min(density(0.5 * (a + b)));
        if !(infimum > DENSITY_FLOOR) {
            return Err(Error::NotLipschitz { infimum });
        }
        Ok(1.0 / infimum)
    }
}

/// Competence levels sorted from most to least competent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompetenceProfile {
    probs: Vec<f64>,
}

impl CompetenceProfile {
    /// Validates and sorts `probs` into non-increasing order.
    pub fn from_unsorted(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, p) in probs.iter_mut().enumerate() {
            *p = checked_prob(i, *p)?;
        }
        probs.sort_unstable_by(|a, b| b.total_cmp(a));
        Ok(CompetenceProfile { probs })
    }

    /// Accepts `probs` only if already sorted non-increasing.
    pub fn from_sorted(probs: Vec<f64>) -> Result<Self> {
        if let Some(i) = probs.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!(
                "profile is not sorted: entry {} ({}) < entry {} ({})",
                i,
                probs[i],
                i + 1,
                probs[i + 1]
            )));
        }
        Self::from_unsorted(probs)
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// The `k` most competent voters.
    pub fn top(&self, k: usize) -> &[f64] {
        &self.probs[..k.min(self.probs.len())]
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }
}

/// Draws `n` competences with `rng` and sorts them.
pub fn sample_profile_with(
    dist: &CompetenceDistribution,
    n: usize,
    rng: &mut StreamRng,
) -> Result<CompetenceProfile> {
    if n == 0 {
        return Err(Error::invalid("population size must be at least 1"));
    }
    let mut probs: Vec<f64> = (0..n).map(|_| dist.sample(rng)).collect();
    probs.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(CompetenceProfile { probs })
}

/// `n` i.i.d. draws from `dist`, sorted descending. Same seed, same profile.
pub fn sample_profile(
    dist: &CompetenceDistribution,
    n: usize,
    seed: u64,
) -> Result<CompetenceProfile> {
    let mut rng = rng::substream(seed, rng::domain::PROFILE, 0);
    sample_profile_with(dist, n, &mut rng)
}

/// `p_(i) = (n + 1 - i) / (n + 1)`: the expected order statistics of `n`
/// standard uniforms, most competent first.
pub fn expected_uniform_profile(n: usize) -> Result<CompetenceProfile> {
    if n == 0 {
        return Err(Error::invalid("population size must be at least 1"));
    }
    let denom = (n + 1) as f64;
    let probs = (0..n).map(|i| (n - i) as f64 / denom).collect();
    Ok(CompetenceProfile { probs })
}

pub fn dist_stats(dist: &CompetenceDistribution) -> Result<DistStats> {
    dist.stats()
}

pub fn quantile_lipschitz_constant(dist: &CompetenceDistribution) -> Result<f64> {
    dist.quantile_lipschitz_constant()
}

/// True iff `|F(p_(i)) - (n - i)/n| <= eps` for every rank `i = 1..=n`.
pub fn dkw_band_check(
    dist: &CompetenceDistribution,
    profile: &CompetenceProfile,
    eps: f64,
) -> bool {
    let n = profile.n() as f64;
    profile.probs().iter().enumerate().all(|(idx, &p)| {
        let rank = (idx + 1) as f64;
        (dist.cdf(p) - (n - rank) / n).abs() <= eps
    })
}
