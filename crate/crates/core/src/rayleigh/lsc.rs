use super::capacities::caps;
use super::group::{on_off_optimum, rate};
use super::{RayleighSystem, ThresholdPolicy};
use crate::mathkit::{h2, inv_binary_entropy, Branch};
use crate::twostate::CrossoverPair;
use crate::{Error, Result};

/// Bits per sub-channel per use when exactly the sub-channels above `t`
/// are active.
pub fn coin_rate(sys: &RayleighSystem, t: f64) -> f64 {
    rate(sys, 1.0, t) / sys.nf()
}

pub(crate) fn lossless_policy(sys: &RayleighSystem, t: f64, feedback_rate: f64) -> Result<ThresholdPolicy> {
    let q = (-t).exp();
    let (c1, c0) = caps(sys, q.max(1e-300), t)?;
    Ok(ThresholdPolicy {
        t,
        q,
        p: q,
        eps: CrossoverPair { eps0: 0.0, eps1: 0.0 },
        c1,
        c0,
        forward_rate: coin_rate(sys, t),
        feedback_rate,
        on_boundary: false,
    })
}

/// Threshold adjustment with lossless reporting of the good set under a
/// budget of `b` bits per block.
pub fn lsc_threshold_rate(sys: &RayleighSystem, b: f64) -> Result<ThresholdPolicy> {
    if sys.alpha != 0.0 {
        return Err(Error::Precondition("independent sub-channels required (alpha = 0)".into()));
    }
    if !(b >= 0.0) {
        return Err(Error::domain(format!("feedback budget b = {b} must be >= 0")));
    }
    let n = sys.nf();
    let best = on_off_optimum(sys);
    if best.feedback_bits <= b {
        return lossless_policy(sys, best.t, h2(best.q));
    }
    // The budget admits q below x or above 1 - x; the rate is unimodal in t,
    // so the better boundary wins.
    let x = inv_binary_entropy((b / n).min(1.0), Branch::Lower)?;
    let mut candidates = vec![-(-x).ln_1p()];
    if x > 0.0 {
        candidates.push(-x.ln());
    }
    let t = candidates
        .into_iter()
        .max_by(|a, b| coin_rate(sys, *a).total_cmp(&coin_rate(sys, *b)))
        .expect("non-empty");
    lossless_policy(sys, t, h2((-t).exp()))
}
