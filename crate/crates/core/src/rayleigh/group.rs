use serde::{Deserialize, Serialize};

use super::{GroupPolicy, RayleighSystem};
use crate::mathkit::{golden_max, h2, inv_binary_entropy, tail_log_integral_scaled, Branch};
use crate::{Error, Result, LOG2_E};

/// Below this activation probability the rate is taken as zero.
const Q_FLOOR: f64 = 1e-280;

/// Total rate in bits per channel use of group loading: groups of `m` sub-channels
/// whose gains all exceed `t` share the power `snr`.
pub fn group_rate(sys: &RayleighSystem, m: f64, t: f64) -> Result<f64> {
    if !(m >= 1.0 && m <= sys.nf()) {
        return Err(Error::domain(format!("group size m = {m} must lie in [1, {}]", sys.n)));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("threshold t = {t} must be finite and >= 0")));
    }
    Ok(rate(sys, m, t))
}

pub(crate) fn rate(sys: &RayleighSystem, m: f64, t: f64) -> f64 {
    let q = (-m * t).exp();
    if q < Q_FLOOR {
        return 0.0;
    }
    let n = sys.nf();
    let a = sys.snr / (n * q);
    // N q e^t ∫_t^∞ e^{-τ} ln(1 + aτ) dτ
    n * q * tail_log_integral_scaled(t, a).unwrap_or(0.0) * LOG2_E
}

fn feedback_bits(sys: &RayleighSystem, m: f64, t: f64) -> f64 {
    sys.nf() / m * h2((-m * t).exp())
}

/// Best threshold for a fixed group size under a feedback budget of `b` bits.
fn best_t(sys: &RayleighSystem, m: f64, b: f64) -> (f64, f64, bool) {
    let t_max = (sys.nf().ln() + 8.0) / m;
    let f = |t: f64| rate(sys, m, t);
    let search = |lo: f64, hi: f64| -> (f64, f64) {
        if hi <= lo {
            return (lo, f(lo));
        }
        // Coarse scan first so golden section starts in the right basin.
        const SCAN: usize = 24;
        let mut best = (lo, f(lo));
        let mut k = 0;
        for i in 1..=SCAN {
            let t = lo + (hi - lo) * i as f64 / SCAN as f64;
            let v = f(t);
            if v > best.1 {
                best = (t, v);
                k = i;
            }
        }
        let step = (hi - lo) / SCAN as f64;
        let a = lo + step * (k.saturating_sub(1)) as f64;
        let c = (lo + step * (k + 1) as f64).min(hi);
        let g = golden_max(f, a, c, 1e-10 * (1.0 + c));
        if g.1 >= best.1 {
            g
        } else {
            best
        }
    };
    let unconstrained = search(0.0, t_max);
    if feedback_bits(sys, m, unconstrained.0) <= b * (1.0 + 1e-12) {
        return (unconstrained.0, unconstrained.1, false);
    }
    let per_group = (b * m / sys.nf()).min(1.0);
    let x = inv_binary_entropy(per_group, Branch::Lower).unwrap_or(0.0);
    let mut best = (0.0, f64::NEG_INFINITY);
    if x > 0.0 {
        // q <= x, i.e. t >= -ln(x)/m.
        let t_lo = -x.ln() / m;
        if t_lo < t_max {
            let c = search(t_lo, t_max);
            if c.1 > best.1 {
                best = c;
            }
        }
        // q >= 1 - x.
        let t_hi = -(-x).ln_1p() / m;
        let c = search(0.0, t_hi);
        if c.1 > best.1 {
            best = c;
        }
    } else {
        best = (0.0, f(0.0));
    }
    (best.0, best.1, true)
}

fn make_policy(sys: &RayleighSystem, m: f64, b: f64) -> GroupPolicy {
    let (t, total, constrained) = best_t(sys, m, b);
    GroupPolicy {
        m,
        t,
        forward_rate: total / sys.nf(),
        total_rate: total,
        feedback_bits: feedback_bits(sys, m, t),
        constrained,
    }
}

fn check(sys: &RayleighSystem, b: f64) -> Result<()> {
    if !(b > 0.0) {
        return Err(Error::domain(format!("feedback budget b = {b} must be positive")));
    }
    if sys.alpha != 0.0 {
        return Err(Error::Precondition("group loading is analyzed for independent sub-channels only".into()));
    }
    Ok(())
}

/// Optimum over real group sizes `m ∈ [1, n]` and thresholds.
pub fn group_optimize_continuous(sys: &RayleighSystem, b: f64) -> Result<GroupPolicy> {
    check(sys, b)?;
    let ln_n = sys.nf().ln();
    let value = |u: f64| best_t(sys, u.exp(), b).1;
    const SCAN: usize = 160;
    let mut k = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=SCAN {
        let v = value(ln_n * i as f64 / SCAN as f64);
        if v > best {
            best = v;
            k = i;
        }
    }
    let step = ln_n / SCAN as f64;
    let lo = step * k.saturating_sub(1) as f64;
    let hi = (step * (k + 1) as f64).min(ln_n);
    let (u, _) = golden_max(value, lo, hi, 1e-9);
    Ok(make_policy(sys, u.exp().clamp(1.0, sys.nf()), b))
}

/// Optimum over integer group sizes: the better of the two integers
/// around the real optimum.
pub fn group_optimize(sys: &RayleighSystem, b: f64) -> Result<GroupPolicy> {
    let cont = group_optimize_continuous(sys, b)?;
    let lo = cont.m.floor().max(1.0);
    let hi = cont.m.ceil().min(sys.nf());
    Ok(better(make_policy(sys, lo, b), make_policy(sys, hi, b)))
}

/// Like [`group_optimize`] but restricted to group sizes that divide `n`,
/// so every group is complete.
pub fn group_optimize_divisor(sys: &RayleighSystem, b: f64) -> Result<GroupPolicy> {
    let cont = group_optimize_continuous(sys, b)?;
    let n = sys.n;
    let below = (1..=cont.m.floor().max(1.0) as u64).rev().find(|d| n % d == 0).unwrap_or(1);
    let above = (cont.m.ceil().max(1.0) as u64..=n).find(|d| n % d == 0).unwrap_or(n);
    Ok(better(make_policy(sys, below as f64, b), make_policy(sys, above as f64, b)))
}

fn better(a: GroupPolicy, b: GroupPolicy) -> GroupPolicy {
    if b.total_rate > a.total_rate {
        b
    } else {
        a
    }
}

/// Unconstrained on-off power allocation over single sub-channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOffOptimum {
    pub t: f64,
    pub q: f64,
    /// Bits per channel use summed over all sub-channels.
    pub total_rate: f64,
    /// Feedback bits per block needed to report every good sub-channel, `n H2(q)`.
    pub feedback_bits: f64,
}

/// Best single-sub-channel threshold with unlimited feedback. Its feedback
/// need is the budget at which threshold schemes stop improving.
pub fn on_off_optimum(sys: &RayleighSystem) -> OnOffOptimum {
    let (t, total, _) = best_t(sys, 1.0, f64::INFINITY);
    let q = (-t).exp();
    OnOffOptimum { t, q, total_rate: total, feedback_bits: sys.nf() * h2(q) }
}
