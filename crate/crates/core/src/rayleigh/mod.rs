//! Threshold-based feedback for Rayleigh block-fading sub-channels.
//!
//! A sub-channel is good when its gain `|h|^2` (unit-mean exponential)
//! exceeds a threshold `t`, so `q = e^{-t}`. Power `P` is spread evenly over
//! the activated sub-channels.

mod ar1;
mod asymptotic;
mod capacities;
mod group;
mod lsc;
mod vq;
mod waterfill;

use serde::{Deserialize, Serialize};

use crate::twostate::CrossoverPair;
use crate::{Error, Result};

pub use ar1::{ar1_achievable_rate, ar1_transition, joint_exceedance, joint_exceedance_quadrature, joint_exceedance_series, lsc_markov_rate, markov_entropy_rate_at};
pub use asymptotic::{eta1, eta2, group_asymptotic, ustar, AsymptoticRegime, AsymptoticSolution, EtaRoot, Regime};
pub use capacities::good_bad_capacities;
pub use group::{group_optimize, group_optimize_continuous, group_optimize_divisor, group_rate, on_off_optimum, OnOffOptimum};
pub use lsc::{coin_rate, lsc_threshold_rate};
pub use vq::{vq_lower_bound, vq_optimize};
pub use waterfill::{waterfill_sum_rate, waterfilling_reference, WaterfillReport};
pub(crate) use waterfill::draw_gains;

/// `n` sub-channels sharing total SNR `snr`, with adjacent-gain correlation `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighSystem {
    pub n: u64,
    /// Total linear SNR `P`.
    pub snr: f64,
    /// Correlation of adjacent sub-channel coefficients; 0 means independent.
    pub alpha: f64,
}

impl RayleighSystem {
    pub fn new(n: u64, snr: f64, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("sub-channel count must be >= 1"));
        }
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(Error::domain(format!("snr = {snr} must be positive")));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::domain(format!("alpha = {alpha} must lie in [0, 1)")));
        }
        Ok(RayleighSystem { n, snr, alpha })
    }

    pub fn independent(n: u64, snr: f64) -> Result<Self> {
        Self::new(n, snr, 0.0)
    }

    /// Converts decibels to linear SNR.
    pub fn db_to_linear(db: f64) -> f64 {
        10f64.powf(db / 10.0)
    }

    pub(crate) fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Upper end of the threshold search range.
    pub(crate) fn t_max(&self) -> f64 {
        self.nf().ln() + 3.0
    }

    /// Rate per sub-channel with power spread over all sub-channels, no feedback.
    pub fn spread_rate(&self) -> f64 {
        coin_rate(self, 0.0)
    }
}

/// An optimized threshold scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub t: f64,
    /// `e^{-t}`.
    pub q: f64,
    /// Activation fraction.
    pub p: f64,
    pub eps: CrossoverPair,
    /// Good/bad sub-channel capacities at this `(p, t)`, bits per use.
    pub c1: f64,
    pub c0: f64,
    /// Bits per sub-channel per use.
    pub forward_rate: f64,
    /// Bits per sub-channel per block actually used.
    pub feedback_rate: f64,
    pub on_boundary: bool,
}

/// An optimized group-loading scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupPolicy {
    /// Sub-channels per group.
    pub m: f64,
    pub t: f64,
    /// Bits per sub-channel per use.
    pub forward_rate: f64,
    /// Bits per channel use summed over all sub-channels.
    pub total_rate: f64,
    /// Feedback bits per block, `(n/m) H2(e^{-mt})`.
    pub feedback_bits: f64,
    /// Whether the feedback budget limits the choice of `t`.
    pub constrained: bool,
}
