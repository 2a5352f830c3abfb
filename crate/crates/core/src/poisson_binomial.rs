//! Vote-count distributions for independent, heterogeneous Bernoulli voters.
//!
//! [`PoissonBinomialPmf`] holds the full distribution of the number of
//! correct votes and is grown one voter at a time, so the whole curve
//! `k = 1..=n` costs `O(n^2)`. [`TruncatedPmf`] is the same recurrence
//! restricted to the window of non-negligible mass; it is what the Monte
//! Carlo code uses for populations in the hundreds of thousands.
//!
//! A congress decides correctly on a strict majority: with `k` voters the
//! decision is correct iff more than `k / 2` of them are. Ties lose.

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack allowed on either side of `[0, 1]` before a probability is rejected.
pub const PROB_SLACK: f64 = 1e-12;

/// DP entries in `[NEGATIVE_MASS_FLOOR, 0)` are rounding noise and are
/// clamped to zero; anything lower is an internal error.
pub const NEGATIVE_MASS_FLOOR: f64 = -1e-15;

/// Largest committee for which [`recursion_identity_check`] enumerates subsets.
pub const MAX_ENUMERATION_VOTERS: usize = 15;

/// Validates one success probability, snapping values within [`PROB_SLACK`]
/// of the unit interval back onto it.
pub(crate) fn checked_prob(index: usize, value: f64) -> Result<f64> {
    if !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&value) {
        return Err(Error::InvalidProbability { index, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// A non-empty sequence of per-voter success probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SuccessProbVector(Vec<f64>);

impl SuccessProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let probs = probs
            .into_iter()
            .enumerate()
            .map(|(i, p)| checked_prob(i, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(SuccessProbVector(probs))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<&[f64]> for SuccessProbVector {
    type Error = Error;

    fn try_from(value: &[f64]) -> Result<Self> {
        SuccessProbVector::new(value.to_vec())
    }
}

impl TryFrom<Vec<f64>> for SuccessProbVector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        SuccessProbVector::new(value)
    }
}

fn settle(value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= NEGATIVE_MASS_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "Poisson-binomial DP produced negative mass {value:e}"
        )))
    }
}

/// `mass[j]` = probability that exactly `j` voters are correct.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonBinomialPmf {
    mass: Vec<f64>,
}

impl Default for PoissonBinomialPmf {
    fn default() -> Self {
        Self::empty()
    }
}

impl PoissonBinomialPmf {
    /// Distribution over zero voters: no one is correct with certainty.
    pub fn empty() -> Self {
        PoissonBinomialPmf { mass: vec![1.0] }
    }

    pub fn new(probs: &SuccessProbVector) -> Self {
        let mut pmf = Self::empty();
        pmf.mass.reserve(probs.len());
        for &p in probs.as_slice() {
            pmf.push_unchecked(p);
        }
        pmf
    }

    /// Adds one voter in place.
    pub fn push(&mut self, p_new: f64) -> Result<()> {
        let p = checked_prob(self.voters(), p_new)?;
        self.push_unchecked(p);
        for m in &mut self.mass {
            *m = settle(*m)?;
        }
        Ok(())
    }

    /// Returns the distribution with one more voter appended.
    pub fn extended(&self, p_new: f64) -> Result<Self> {
        let mut next = self.clone();
        next.push(p_new)?;
        Ok(next)
    }

    fn push_unchecked(&mut self, p: f64) {
        let q = 1.0 - p;
        self.mass.push(0.0);
        for j in (1..self.mass.len()).rev() {
            self.mass[j] = self.mass[j] * q + self.mass[j - 1] * p;
        }
        self.mass[0] *= q;
    }

    pub fn voters(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_mass(self) -> Vec<f64> {
        self.mass
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Probability that exactly `j` voters are correct.
    pub fn event_prob(&self, j: usize) -> Result<f64> {
        self.mass.get(j).copied().ok_or(Error::IndexOutOfRange {
            index: j,
            max: self.voters(),
        })
    }

    /// Probability of a strictly-majority-correct outcome.
    pub fn majority_prob(&self) -> f64 {
        let k = self.voters();
        self.mass[k / 2 + 1..].iter().sum()
    }

    /// Probability that at most half the voters are correct, `1 - majority_prob`.
    ///
    /// Summed directly from the lower tail so it keeps full relative precision
    /// when the majority is almost surely right.
    pub fn failure_prob(&self) -> f64 {
        let k = self.voters();
        self.mass[..=k / 2].iter().sum()
    }
}

/// Exact vote-count distribution of `probs`.
pub fn pmf(probs: &[f64]) -> Result<PoissonBinomialPmf> {
    Ok(PoissonBinomialPmf::new(&SuccessProbVector::try_from(
        probs,
    )?))
}

/// `pmf` with one more voter, without recomputing from scratch.
pub fn extend(pmf: &PoissonBinomialPmf, p_new: f64) -> Result<PoissonBinomialPmf> {
    pmf.extended(p_new)
}

/// `Pr[sum X_i > k/2]` for independent `X_i ~ Bern(probs[i])`.
pub fn majority_prob(probs: &[f64]) -> Result<f64> {
    Ok(pmf(probs)?.majority_prob())
}

/// `Pr[sum X_i <= k/2]`, accurate to full relative precision near zero.
pub fn failure_prob(probs: &[f64]) -> Result<f64> {
    Ok(pmf(probs)?.failure_prob())
}

/// Probability that exactly `j` of the voters are correct.
pub fn event_prob(probs: &[f64], j: usize) -> Result<f64> {
    let probs = SuccessProbVector::try_from(probs)?;
    if j > probs.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: probs.len(),
        });
    }
    PoissonBinomialPmf::new(&probs).event_prob(j)
}

/// Evaluates both sides of the subset-counting identity
///
/// `Pr[exactly j correct] = 1/(k-j) * sum_{|S|=j+1} w(S) * sum_{i in S} (1-p_i)/p_i`
///
/// where `w(S)` is the probability that exactly the voters in `S` are correct.
/// The left side comes from the DP, the right side from explicit enumeration
/// of all `2^k` subsets.
pub fn recursion_identity_check(probs: &[f64], j: usize) -> Result<(f64, f64)> {
    let probs = SuccessProbVector::try_from(probs)?;
    let p = probs.as_slice();
    let k = p.len();
    if k > MAX_ENUMERATION_VOTERS {
        return Err(Error::TooLarge {
            what: "voters",
            value: k,
            limit: MAX_ENUMERATION_VOTERS,
        });
    }
    if j >= k {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: k - 1,
        });
    }
    if let Some(index) = p.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroProbability { index });
    }

    let lhs = PoissonBinomialPmf::new(&probs).event_prob(j)?;

    let odds_against: Vec<f64> = p.iter().map(|&x| (1.0 - x) / x).collect();
    let mut acc = 0.0;
    for subset in 0u32..(1u32 << k) {
        if subset.count_ones() as usize != j + 1 {
            continue;
        }
        let mut weight = 1.0;
        let mut odds = 0.0;
        for (i, &pi) in p.iter().enumerate() {
            if subset & (1 << i) != 0 {
                weight *= pi;
                odds += odds_against[i];
            } else {
                weight *= 1.0 - pi;
            }
        }
        acc += weight * odds;
    }
    let rhs = acc / (k - j) as f64;
    Ok((lhs, rhs))
}

/// Entries below this are dropped from the edges of a [`TruncatedPmf`].
pub const DEFAULT_NEGLIGIBLE_MASS: f64 = 1e-30;

/// Vote-count distribution restricted to the window of non-negligible mass.
///
/// After each voter is added, leading and trailing entries smaller than the
/// floor are discarded and their total is kept in [`TruncatedPmf::dropped_mass`],
/// which bounds the absolute error of every probability read from the window.
/// For `n` voters the window width is `O(sqrt(n))`, so a full pass costs
/// `O(n^1.5)` instead of `O(n^2)`.
#[derive(Debug, Clone)]
pub struct TruncatedPmf {
    offset: usize,
    mass: Vec<f64>,
    scratch: Vec<f64>,
    voters: usize,
    dropped: f64,
    floor: f64,
}

impl TruncatedPmf {
    pub fn new(floor: f64) -> Self {
        TruncatedPmf {
            offset: 0,
            mass: vec![1.0],
            scratch: Vec::new(),
            voters: 0,
            dropped: 0.0,
            floor: floor.max(0.0),
        }
    }

    pub fn push(&mut self, p: f64) -> Result<()> {
        let p = checked_prob(self.voters, p)?;
        let q = 1.0 - p;
        let len = self.mass.len();
        self.scratch.clear();
        self.scratch.resize(len + 1, 0.0);
        self.scratch[0] = self.mass[0] * q;
        for ((out, &stay), &step) in self.scratch[1..len]
            .iter_mut()
            .zip(&self.mass[1..])
            .zip(&self.mass[..len - 1])
        {
            *out = stay * q + step * p;
        }
        self.scratch[len] = self.mass[len - 1] * p;
        self.voters += 1;

        let keep = |x: &f64| *x >= self.floor && *x > 0.0;
        let (lo, hi) = match (
            self.scratch.iter().position(keep),
            self.scratch.iter().rposition(keep),
        ) {
            (Some(lo), Some(hi)) => (lo, hi),
            // Everything underflowed the floor; keep the single largest entry.
            _ => {
                let arg = self
                    .scratch
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                (arg, arg)
            }
        };
        self.dropped += self.scratch[..lo].iter().sum::<f64>();
        self.dropped += self.scratch[hi + 1..].iter().sum::<f64>();
        self.offset += lo;
        if lo == 0 && hi == len {
            std::mem::swap(&mut self.mass, &mut self.scratch);
        } else {
            self.mass.clear();
            self.mass.extend_from_slice(&self.scratch[lo..=hi]);
        }
        Ok(())
    }

    pub fn voters(&self) -> usize {
        self.voters
    }

    /// Total mass discarded so far; an absolute error bound on any tail sum.
    pub fn dropped_mass(&self) -> f64 {
        self.dropped
    }

    /// Smallest count still represented in the window.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn window(&self) -> &[f64] {
        &self.mass
    }

    /// `Pr[at most half the voters are correct]`.
    pub fn failure_prob(&self) -> f64 {
        let cutoff = self.voters / 2;
        if cutoff < self.offset {
            return 0.0;
        }
        let upto = (cutoff - self.offset + 1).min(self.mass.len());
        self.mass[..upto].iter().sum()
    }

    pub fn majority_prob(&self) -> f64 {
        let cutoff = self.voters / 2;
        let from = (cutoff + 1)
            .saturating_sub(self.offset)
            .min(self.mass.len());
        self.mass[from..].iter().sum()
    }
}
