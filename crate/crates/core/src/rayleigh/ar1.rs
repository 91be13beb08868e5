//! Correlated sub-channels: adjacent coefficients follow an AR(1) model,
//! so the good/bad sequence is approximated by a two-state Markov chain.

use std::collections::HashMap;

use super::capacities::caps;
use super::group::on_off_optimum;
use super::lsc::{coin_rate, lossless_policy};
use super::vq::P_MIN;
use super::{RayleighSystem, ThresholdPolicy};
use crate::mathkit::{bessel_i0e, integrate, maximize_box, BoxOptions};
use crate::twostate::{markov_lower_crossover, markov_ub_rate, MarkovSource};
use crate::{Error, Result};

/// Above this correlation the joint density is too peaked for plain quadrature.
const SERIES_ALPHA: f64 = 0.95;
const MAX_INTERVALS: usize = 2000;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in [0, 1)")));
    }
    Ok(())
}

fn check_threshold(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("threshold t = {t} must be finite and >= 0")));
    }
    Ok(())
}

/// Joint density of adjacent gains, `g(x, y)`, with the Bessel factor scaled
/// so that large arguments do not overflow.
fn density(alpha: f64, x: f64, y: f64) -> f64 {
    let c = 1.0 - alpha * alpha;
    let r = (x * y).sqrt();
    let z = 2.0 * alpha * r / c;
    (-(x + y - 2.0 * alpha * r) / c).exp() * bessel_i0e(z).unwrap_or(0.0) / c
}

/// `P(X > t, Y > t)` for adjacent gains, by nested adaptive quadrature.
pub fn joint_exceedance_quadrature(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_threshold(t)?;
    let top = t + 60.0 * (1.0 - alpha * alpha) + 60.0;
    let mut inner_err = None;
    let outer = integrate(
        |x| match integrate(|y| density(alpha, x, y), t, top, 1e-15, 1e-11, MAX_INTERVALS) {
            Ok(q) => q.value,
            Err(e) => {
                inner_err.get_or_insert(e);
                f64::NAN
            }
        },
        t,
        top,
        1e-14,
        1e-10,
        MAX_INTERVALS,
    );
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(outer?.value)
}

/// `P(X > t, Y > t)` from the Bessel series integrated term by term:
/// `(1 - α²) Σ_k α^{2k} Q(k + 1, s)²` with `s = t / (1 - α²)` and `Q` the
/// regularized upper incomplete gamma function.
pub fn joint_exceedance_series(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_threshold(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    if alpha == 0.0 {
        return Ok((-2.0 * t).exp());
    }
    let c = 1.0 - alpha * alpha;
    let s = t / c;
    let (ln_s, ln_a2) = (s.ln(), 2.0 * alpha.ln());
    // Q(k+1, s) is a Poisson(s) CDF at k; accumulate it in log space.
    let mut ln_pmf = -s;
    let mut ln_q = ln_pmf;
    let mut sum = 0.0;
    let mut k = 0u64;
    loop {
        let term = (c.ln() + k as f64 * ln_a2 + 2.0 * ln_q).exp();
        sum += term;
        if k as f64 > s && term <= 1e-17 * sum {
            break;
        }
        k += 1;
        if k > 50_000_000 {
            return Err(Error::NonConvergence { iterations: k as usize, estimate: sum, error: term });
        }
        ln_pmf += ln_s - (k as f64).ln();
        let (hi, lo) = if ln_q > ln_pmf { (ln_q, ln_pmf) } else { (ln_pmf, ln_q) };
        ln_q = hi + (lo - hi).exp().ln_1p();
    }
    Ok(sum)
}

/// `P(X > t, Y > t)` for adjacent gains.
pub fn joint_exceedance(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        check_threshold(t)?;
        return Ok((-2.0 * t).exp());
    }
    if alpha > SERIES_ALPHA {
        joint_exceedance_series(alpha, t)
    } else {
        joint_exceedance_quadrature(alpha, t)
    }
}

/// Markov chain of good states (gain above `t`) along the sub-channels.
pub fn ar1_transition(alpha: f64, t: f64) -> Result<MarkovSource> {
    check_alpha(alpha)?;
    check_threshold(t)?;
    if t == 0.0 {
        return Err(Error::domain("threshold 0 makes every sub-channel good"));
    }
    let q = (-t).exp();
    let both = joint_exceedance(alpha, t)?;
    let delta10 = 1.0 - both / q;
    MarkovSource::new(q * delta10 / (1.0 - q), delta10)
}

/// Conditional entropy `H(S1 | S0)` in bits, the lossless feedback cost per
/// sub-channel at threshold `t`.
pub fn markov_entropy_rate_at(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_threshold(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(ar1_transition(alpha, t)?.entropy_rate())
}

fn require_correlated(sys: &RayleighSystem) -> Result<()> {
    if !(sys.alpha > 0.0) {
        return Err(Error::Precondition("correlated sub-channels required (alpha > 0)".into()));
    }
    Ok(())
}

/// Threshold scheme with lossy feedback over correlated sub-channels,
/// using the reports of the achievable crossover pair at feedback rate `rf`
/// bits per sub-channel.
pub fn ar1_achievable_rate(sys: &RayleighSystem, rf: f64) -> Result<ThresholdPolicy> {
    require_correlated(sys)?;
    if !(rf >= 0.0) {
        return Err(Error::domain(format!("feedback rate {rf} must be >= 0")));
    }
    let point = |src: &MarkovSource, p: f64, t: f64| -> Option<ThresholdPolicy> {
        let (c1, c0) = caps(sys, p, t).ok()?;
        let q = src.q();
        let (eps, _) = markov_lower_crossover(src, p.min(1.0), rf).ok()?;
        let forward_rate = q * (1.0 - eps.eps0) * (c1 - c0) + p * c0;
        let feedback_rate = markov_ub_rate(src, eps).ok()?;
        Some(ThresholdPolicy { t, q, p, eps, c1, c0, forward_rate, feedback_rate, on_boundary: false })
    };
    // Transitions depend on t only and cost a 2-D integral each, so the
    // activation fraction is optimized inside a search over t.
    let inner = |t: f64| -> Option<ThresholdPolicy> {
        let src = ar1_transition(sys.alpha, t).ok()?;
        let f = |x: &[f64]| point(&src, x[0], t).map_or(f64::NEG_INFINITY, |pol| pol.forward_rate);
        let best = maximize_box(f, &[(P_MIN, 1.0)], &BoxOptions::default()).ok()?;
        let mut pol = point(&src, best.x[0], t)?;
        pol.on_boundary = best.on_boundary[0] && best.x[0] < 1.0;
        Some(pol)
    };
    let mut seen: HashMap<u64, Option<ThresholdPolicy>> = HashMap::new();
    let mut cached = |t: f64| *seen.entry(t.to_bits()).or_insert_with(|| inner(t));
    let outer = maximize_box(
        |x| cached(x[0]).map_or(f64::NEG_INFINITY, |pol| pol.forward_rate),
        &[(1e-3, sys.t_max())],
        &BoxOptions::default(),
    )?;
    let mut pol = cached(outer.x[0]).ok_or_else(|| Error::Infeasible("optimum left the feasible set".into()))?;
    pol.on_boundary |= outer.boundary();
    Ok(pol)
}

/// Threshold adjustment with lossless, chain-aware reporting of the good set
/// under a budget of `b` bits per block.
pub fn lsc_markov_rate(sys: &RayleighSystem, b: f64) -> Result<ThresholdPolicy> {
    require_correlated(sys)?;
    if !(b >= 0.0) {
        return Err(Error::domain(format!("feedback budget b = {b} must be >= 0")));
    }
    let n = sys.nf();
    let cost = |t: f64| markov_entropy_rate_at(sys.alpha, t).map(|h| n * h);
    let best = on_off_optimum(sys);
    if b == 0.0 {
        return lossless_policy(sys, 0.0, 0.0);
    }
    if cost(best.t)? <= b {
        return lossless_policy(sys, best.t, cost(best.t)? / n);
    }
    // Rate is unimodal in t, so the feasible thresholds nearest the
    // unconstrained optimum on either side are the only candidates.
    let mut candidates = Vec::new();
    for end in [0.0, sys.nf().ln() + 8.0] {
        if let Some(t) = nearest_feasible(&cost, best.t, end, b)? {
            candidates.push(t);
        }
    }
    let t = candidates
        .into_iter()
        .max_by(|a, b| coin_rate(sys, *a).total_cmp(&coin_rate(sys, *b)))
        .unwrap_or(0.0);
    lossless_policy(sys, t, if t == 0.0 { 0.0 } else { cost(t)? / n })
}

/// Feasible threshold closest to the infeasible `from`, walking toward `to`.
fn nearest_feasible<F: Fn(f64) -> Result<f64>>(cost: &F, from: f64, to: f64, b: f64) -> Result<Option<f64>> {
    const SCAN: usize = 48;
    let mut prev = from;
    for i in 1..=SCAN {
        let t = from + (to - from) * i as f64 / SCAN as f64;
        if t == 0.0 || cost(t)? <= b {
            let (mut bad, mut good) = (prev, t);
            while (good - bad).abs() > 1e-12 * (1.0 + good.abs()) {
                let mid = 0.5 * (bad + good);
                if cost(mid)? <= b {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            return Ok(Some(good));
        }
        prev = t;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathkit::h2;

    #[test]
    fn independence_factorizes() {
        for t in [0.3, 1.0, 3.0] {
            let src = ar1_transition(0.0, t).unwrap();
            assert!((src.delta10 - (1.0 - (-t).exp())).abs() < 1e-12);
            let s = joint_exceedance_series(0.0, t).unwrap();
            assert!((s - (-2.0 * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_matches_series() {
        for alpha in [0.1, 0.6, 0.9, 0.95] {
            for t in [0.05, 1.2, 4.0] {
                let a = joint_exceedance_quadrature(alpha, t).unwrap();
                let b = joint_exceedance_series(alpha, t).unwrap();
                assert!((a - b).abs() < 1e-9 * b.max(1e-3), "alpha={alpha} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn strong_correlation_rarely_switches() {
        let src = ar1_transition(0.999, 1.0).unwrap();
        assert!(src.delta10 < 0.05, "{src:?}");
        let q = (-1.0f64).exp();
        assert!((q * src.delta10 - (1.0 - q) * src.delta01).abs() < 1e-12);
    }

    #[test]
    fn correlation_lowers_report_cost() {
        for t in [0.5, 1.2, 3.0] {
            let q = (-t as f64).exp();
            assert!(markov_entropy_rate_at(0.6, t).unwrap() < h2(q));
        }
    }
}
