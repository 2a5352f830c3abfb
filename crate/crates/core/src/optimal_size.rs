//! Optimal congress size and the bounds that bracket it.
//!
//! [`optimal_k`] is an exhaustive scan over odd committee sizes using the
//! incremental Poisson-binomial DP. Even sizes are skipped: dropping the
//! least competent member of an even committee never lowers its accuracy
//! under the strict-majority rule. The adjacent-size ratio test is computed
//! alongside as a diagnostic; it compares only `k` with `k + 2` and the
//! accuracy curve is not known to be unimodal, so it never drives the answer.
//!
//! Sizes are ranked by failure probability rather than accuracy: for a few
//! hundred voters the best committees are wrong with probability far below
//! `f64::EPSILON`, and `1 - q_k` would round to zero for all of them.

use serde::Serialize;

use crate::competence::{CompetenceDistribution, CompetenceProfile};
use crate::error::{Error, Result};
use crate::poisson_binomial::PoissonBinomialPmf;

/// Additive slack applied around the linear bounds when checking them.
pub const BOUND_SLACK: f64 = 3.0;

/// Two failure probabilities within this relative distance count as a tie.
const TIE_TOLERANCE: f64 = 1e-12;

/// Relative band inside which the ratio test is inconclusive.
pub const RATIO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioVerdict {
    /// `q_{k+2} > q_k`, so `k` is not optimal.
    RulesOutK,
    /// `q_{k+2} < q_k`, so `k + 2` is not optimal.
    RulesOutKPlus2,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioTestOutcome {
    pub k: usize,
    /// `Pr[exactly l+1 of top k correct] / Pr[exactly l correct]`, `k = 2l + 1`.
    pub lhs: f64,
    /// Odds product of the next two voters.
    pub rhs: f64,
    pub verdict: RatioVerdict,
}

/// What the ratio test alone certifies about `K*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PruningDiagnostics {
    /// Every odd size below this is ruled out.
    pub certified_lower: usize,
    /// Every odd size above this is ruled out.
    pub certified_upper: usize,
    pub rules_out_k: usize,
    pub rules_out_k_plus_2: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalSizeResult {
    pub n: usize,
    pub k_star: usize,
    pub max_prob: f64,
    /// `1 - max_prob`, at full relative precision.
    pub min_failure_prob: f64,
    /// `(k, q_k)` for every odd `k <= n`.
    pub q_curve: Vec<(usize, f64)>,
    #[serde(skip)]
    pub failure_curve: Vec<f64>,
    pub pruning: PruningDiagnostics,
}

impl OptimalSizeResult {
    pub fn q(&self, k: usize) -> Option<f64> {
        if k.is_multiple_of(2) {
            return None;
        }
        self.q_curve.get(k / 2).map(|&(_, q)| q)
    }
}

fn classify(k: usize, pmf: &PoissonBinomialPmf, next: f64, after: f64) -> RatioTestOutcome {
    let l = k / 2;
    let mass = pmf.mass();
    let (below, above) = (mass[l], mass[l + 1]);
    let lhs = if below > 0.0 {
        above / below
    } else if above > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    };
    let denom = (1.0 - next) * (1.0 - after);
    let rhs = if denom > 0.0 {
        next * after / denom
    } else {
        f64::INFINITY
    };
    let verdict = if rhs.is_infinite() {
        RatioVerdict::RulesOutK
    } else if lhs.is_nan() || (lhs - rhs).abs() <= RATIO_TOLERANCE * lhs.abs().max(rhs.abs()) {
        RatioVerdict::Inconclusive
    } else if lhs < rhs {
        RatioVerdict::RulesOutK
    } else {
        RatioVerdict::RulesOutKPlus2
    };
    RatioTestOutcome {
        k,
        lhs,
        rhs,
        verdict,
    }
}

/// Exact `K*`: the smallest odd size maximizing the probability that the
/// top-`k` majority is correct.
pub fn optimal_k(profile: &CompetenceProfile) -> OptimalSizeResult {
    let p = profile.probs();
    let n = p.len();
    let mut pmf = PoissonBinomialPmf::empty();
    let mut q_curve = Vec::with_capacity(n / 2 + 1);
    let mut failure_curve = Vec::with_capacity(n / 2 + 1);
    let mut verdicts = Vec::with_capacity(n / 2);
    let (mut k_star, mut best) = (1, f64::INFINITY);

    for (idx, &pk) in p.iter().enumerate() {
        // Entries were validated when the profile was built.
        pmf.push(pk)
            .expect("profile entries are valid probabilities");
        let k = idx + 1;
        if k.is_multiple_of(2) {
            continue;
        }
        let failure = pmf.failure_prob();
        q_curve.push((k, pmf.majority_prob()));
        failure_curve.push(failure);
        if failure < best * (1.0 - TIE_TOLERANCE) {
            best = failure;
            k_star = k;
        }
        if k + 2 <= n {
            verdicts.push(classify(k, &pmf, p[k], p[k + 1]).verdict);
        }
    }

    let largest_odd = if n % 2 == 1 { n } else { n - 1 };
    let certified_lower = verdicts
        .iter()
        .position(|v| *v != RatioVerdict::RulesOutK)
        .map_or(largest_odd, |i| 2 * i + 1);
    let certified_upper = verdicts
        .iter()
        .rposition(|v| *v != RatioVerdict::RulesOutKPlus2)
        .map_or(1, |i| 2 * i + 3);
    let count = |want: RatioVerdict| verdicts.iter().filter(|v| **v == want).count();

    OptimalSizeResult {
        n,
        k_star,
        max_prob: q_curve[k_star / 2].1,
        min_failure_prob: best,
        pruning: PruningDiagnostics {
            certified_lower,
            certified_upper,
            rules_out_k: count(RatioVerdict::RulesOutK),
            rules_out_k_plus_2: count(RatioVerdict::RulesOutKPlus2),
            inconclusive: count(RatioVerdict::Inconclusive),
        },
        q_curve,
        failure_curve,
    }
}

/// Compares committees of size `k` and `k + 2` through the ratio of
/// adjacent event probabilities against the odds of the two new members.
pub fn ratio_test(profile: &CompetenceProfile, k: usize) -> Result<RatioTestOutcome> {
    let p = profile.probs();
    if k.is_multiple_of(2) {
        return Err(Error::invalid(format!("ratio test needs odd k, got {k}")));
    }
    if k + 2 > p.len() {
        return Err(Error::invalid(format!(
            "ratio test needs k + 2 <= n, got k = {k}, n = {}",
            p.len()
        )));
    }
    let mut pmf = PoissonBinomialPmf::empty();
    for &x in &p[..k] {
        pmf.push(x)?;
    }
    Ok(classify(k, &pmf, p[k], p[k + 1]))
}

/// `((3 - 2 sqrt 2) n, n / 2)`: the linear bracket on `K*` for the
/// expected-uniform profile, before the additive constant.
pub fn uniform_bounds(n: usize) -> (f64, f64) {
    let n = n as f64;
    ((3.0 - 2.0 * 2f64.sqrt()) * n, 0.5 * n)
}

/// Linear bracket on `K*` for competences drawn from a distribution whose
/// support `[L, H]` straddles one half.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundedSupportBounds {
    pub c_high: f64,
    pub c_low: f64,
    /// `c_high * n`
    pub lower: f64,
    /// `c_low * n`
    pub upper: f64,
    /// Probability with which the bracket holds, `1 - 4 exp(-2 n eps^2)`.
    pub confidence: f64,
    pub lipschitz: f64,
    pub eps: f64,
}

/// `c_H = 1 - F(1/(1 + sqrt((1-H)/H)) + M eps)` and
/// `c_L = 1 - F(1/(1 + sqrt((1-L)/L)) - M eps)`.
pub fn bounded_support_bounds(
    dist: &CompetenceDistribution,
    n: usize,
    eps: f64,
) -> Result<BoundedSupportBounds> {
    let (low, high) = dist.support();
    if !(low > 0.0 && low < 0.5) {
        return Err(Error::HypothesisViolated(format!(
            "support lower end L = {low} must satisfy 0 < L < 1/2"
        )));
    }
    if !(high > 0.5 && high < 1.0) {
        return Err(Error::HypothesisViolated(format!(
            "support upper end H = {high} must satisfy 1/2 < H < 1"
        )));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!(
            "eps must be finite and >= 0, got {eps}"
        )));
    }
    let m = dist.quantile_lipschitz_constant()?;
    let pivot = |edge: f64| 1.0 / (1.0 + ((1.0 - edge) / edge).sqrt());
    let c_high = dist.sf(pivot(high) + m * eps);
    let c_low = dist.sf(pivot(low) - m * eps);
    let nf = n as f64;
    Ok(BoundedSupportBounds {
        c_high,
        c_low,
        lower: c_high * nf,
        upper: c_low * nf,
        confidence: 1.0 - 4.0 * (-2.0 * nf * eps * eps).exp(),
        lipschitz: m,
        eps,
    })
}
