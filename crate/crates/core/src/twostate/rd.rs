use serde::{Deserialize, Serialize};

use crate::mathkit::{find_root, h2, Tolerance};
use crate::{Error, Result};

/// A population of good/bad sub-channels and its activation budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStateParams {
    /// Probability that a sub-channel is good.
    pub q: f64,
    /// Largest fraction of sub-channels that may be activated.
    pub p: f64,
    /// Capacity of a good sub-channel, bits per use.
    pub c1: f64,
    /// Capacity of a bad sub-channel, bits per use.
    pub c0: f64,
}

impl TwoStateParams {
    pub fn new(q: f64, p: f64, c1: f64, c0: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("q = {q} must lie in (0, 1)")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain(format!("p = {p} must lie in (0, 1]")));
        }
        if !(c0 >= 0.0 && c1 > c0) || !c1.is_finite() {
            return Err(Error::domain(format!("capacities need c1 > c0 >= 0 (got c1 = {c1}, c0 = {c0})")));
        }
        Ok(TwoStateParams { q, p, c1, c0 })
    }

    /// Forward rate with a given missed-opportunity probability.
    pub fn rate_at(&self, eps0: f64) -> f64 {
        self.q * (1.0 - eps0) * (self.c1 - self.c0) + self.p * self.c0
    }
}

/// Missed-opportunity (`eps0`) and misfire (`eps1`) probabilities of a feedback quantizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverPair {
    pub eps0: f64,
    pub eps1: f64,
}

impl CrossoverPair {
    pub fn new(eps0: f64, eps1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps0) || !(0.0..=1.0).contains(&eps1) {
            return Err(Error::domain(format!("crossover probabilities ({eps0}, {eps1}) must lie in [0, 1]")));
        }
        Ok(CrossoverPair { eps0, eps1 })
    }

    /// Fraction of sub-channels activated when a fraction `q` is good.
    pub fn activation(&self, q: f64) -> f64 {
        q * (1.0 - self.eps0) + (1.0 - q) * self.eps1
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("q = {q} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!("p = {p} must lie in (0, 1]")));
    }
    Ok(())
}

/// Feedback bits per sub-channel needed by a quantizer with crossover `eps`:
/// `H2(p) - q H2(eps0) - (1-q) H2(eps1)` where `p` is the implied activation.
pub fn mutual_info_rate(q: f64, eps: CrossoverPair) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("q = {q} must lie in [0, 1]")));
    }
    CrossoverPair::new(eps.eps0, eps.eps1)?;
    Ok(info_raw(q, eps.eps0, eps.eps1))
}

pub(crate) fn info_raw(q: f64, eps0: f64, eps1: f64) -> f64 {
    let p = q * (1.0 - eps0) + (1.0 - q) * eps1;
    (h2(p) - q * h2(eps0) - (1.0 - q) * h2(eps1)).max(0.0)
}

/// Feedback rate beyond which extra feedback no longer helps.
pub fn max_useful_feedback(q: f64, p: f64) -> Result<f64> {
    check_q(q)?;
    check_p(p)?;
    Ok(saturation_rate(q, p))
}

pub(crate) fn saturation_rate(q: f64, p: f64) -> f64 {
    if p <= q {
        h2(p) - q * h2(p / q)
    } else {
        h2(1.0 - p) - (1.0 - q) * h2((1.0 - p) / (1.0 - q))
    }
}

/// Rate-distortion optimal crossover pair for good-state probability `q`,
/// activation fraction `p` and feedback rate `rf`.
pub fn solve_crossover(params: &TwoStateParams, rf: f64) -> Result<CrossoverPair> {
    crossover_for(params.q, params.p, rf)
}

/// [`solve_crossover`] on bare `(q, p)`.
pub fn crossover_for(q: f64, p: f64, rf: f64) -> Result<CrossoverPair> {
    check_q(q)?;
    check_p(p)?;
    if !(rf >= 0.0) {
        return Err(Error::domain(format!("feedback rate {rf} must be >= 0")));
    }
    let eps1_of = |eps0: f64| ((p - q * (1.0 - eps0)) / (1.0 - q)).clamp(0.0, 1.0);
    let lo = (1.0 - p / q).max(0.0);
    // Beyond the independence point eps0 = 1 - p the information rate rises again.
    let hi = 1.0 - p;
    if rf >= saturation_rate(q, p) || hi <= lo {
        return Ok(CrossoverPair { eps0: lo, eps1: eps1_of(lo) });
    }
    if rf <= 0.0 {
        return Ok(CrossoverPair { eps0: hi, eps1: eps1_of(hi) });
    }
    // info(lo) = saturation rate > rf > 0 = info(hi), decreasing in between.
    let tol = Tolerance { abs: 1e-14, rel: 1e-14, max_iter: 300 };
    let eps0 = find_root(|e0| info_raw(q, e0, eps1_of(e0)) - rf, lo, hi, tol)?;
    let pair = CrossoverPair { eps0, eps1: eps1_of(eps0) };
    if info_raw(q, pair.eps0, pair.eps1) > rf + 1e-9 {
        return Err(Error::Infeasible(format!("no crossover pair meets feedback rate {rf}")));
    }
    Ok(pair)
}

/// Largest forward rate per sub-channel at feedback rate `rf`.
pub fn vq_forward_rate(params: &TwoStateParams, rf: f64) -> Result<f64> {
    let eps = solve_crossover(params, rf)?;
    Ok(params.rate_at(eps.eps0))
}

/// Smallest expected missed-opportunity fraction `q * eps0` achievable at
/// feedback rate `rf` with activation fraction `p`.
pub fn distortion_rate(q: f64, p: f64, rf: f64) -> Result<f64> {
    if p >= 1.0 {
        return Ok(0.0);
    }
    Ok(q * crossover_for(q, p, rf)?.eps0)
}
