use serde::{Deserialize, Serialize};

use super::rd::{crossover_for, saturation_rate};
use super::CrossoverPair;
use crate::mathkit::{h2, maximize_box, BoxOptions};
use crate::{Error, Result};

const SLACK: f64 = 1e-12;

/// Stationary two-state Markov chain of sub-channel states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovSource {
    /// P(next good | current bad).
    pub delta01: f64,
    /// P(next bad | current good).
    pub delta10: f64,
}

impl MarkovSource {
    pub fn new(delta01: f64, delta10: f64) -> Result<Self> {
        for (name, d) in [("delta01", delta01), ("delta10", delta10)] {
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::domain(format!("{name} = {d} must lie in (0, 1)")));
            }
        }
        Ok(MarkovSource { delta01, delta10 })
    }

    /// Chain with stationary good probability `q` and good-to-bad probability `delta10`.
    pub fn from_q(q: f64, delta10: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("q = {q} must lie in (0, 1)")));
        }
        MarkovSource::new(q * delta10 / (1.0 - q), delta10)
    }

    /// Stationary probability of the good state.
    pub fn q(&self) -> f64 {
        self.delta01 / (self.delta01 + self.delta10)
    }

    /// Entropy rate `H(S1 | S0)` in bits.
    pub fn entropy_rate(&self) -> f64 {
        let q = self.q();
        q * h2(self.delta10) + (1.0 - q) * h2(self.delta01)
    }

    /// P(S0 = s0, S1 = s1).
    pub fn pair_prob(&self, s0: bool, s1: bool) -> f64 {
        let q = self.q();
        match (s0, s1) {
            (false, false) => (1.0 - q) * (1.0 - self.delta01),
            (false, true) => (1.0 - q) * self.delta01,
            (true, false) => q * self.delta10,
            (true, true) => q * (1.0 - self.delta10),
        }
    }

    /// P(S1 = 1 | S0 = s0).
    fn good_given(&self, s0: bool) -> f64 {
        if s0 {
            1.0 - self.delta10
        } else {
            self.delta01
        }
    }
}

/// Joint probabilities `q_{s0 s1} = P(Ŝ1 = 0, S0 = s0, S1 = s1)` of an
/// off-report together with the previous and current state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointReportProbs {
    pub q00: f64,
    pub q01: f64,
    pub q10: f64,
    pub q11: f64,
}

impl JointReportProbs {
    /// Validates `0 <= q_{s0 s1} <= P(S0 = s0, S1 = s1)`.
    pub fn new(src: &MarkovSource, q00: f64, q01: f64, q10: f64, q11: f64) -> Result<Self> {
        let jp = JointReportProbs { q00, q01, q10, q11 };
        for (s0, s1, v) in jp.cells() {
            let cap = src.pair_prob(s0, s1);
            if !(v >= -SLACK && v <= cap + SLACK) {
                return Err(Error::domain(format!(
                    "q{}{} = {v} outside [0, {cap}]",
                    s0 as u8, s1 as u8
                )));
            }
        }
        Ok(jp)
    }

    /// Error-free reports: Ŝ1 = S1.
    pub fn zero_error(src: &MarkovSource) -> Self {
        JointReportProbs {
            q00: src.pair_prob(false, false),
            q01: 0.0,
            q10: src.pair_prob(true, false),
            q11: 0.0,
        }
    }

    /// Reports that depend on the current state only, through `eps`.
    pub fn from_crossover(src: &MarkovSource, eps: CrossoverPair) -> Self {
        JointReportProbs {
            q00: src.pair_prob(false, false) * (1.0 - eps.eps1),
            q01: src.pair_prob(false, true) * eps.eps0,
            q10: src.pair_prob(true, false) * (1.0 - eps.eps1),
            q11: src.pair_prob(true, true) * eps.eps0,
        }
    }

    /// Fraction of sub-channels reported as good.
    pub fn activation(&self) -> f64 {
        1.0 - (self.q00 + self.q01 + self.q10 + self.q11)
    }

    /// Fraction of sub-channels that are good and reported good.
    pub fn detected(&self, src: &MarkovSource) -> f64 {
        src.q() - self.q01 - self.q11
    }

    fn cells(&self) -> [(bool, bool, f64); 4] {
        [
            (false, false, self.q00),
            (false, true, self.q01),
            (true, false, self.q10),
            (true, true, self.q11),
        ]
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den <= 0.0 {
        return Ok(0.0);
    }
    let r = num / den;
    if !(r >= -SLACK && r <= 1.0 + SLACK) {
        return Err(Error::domain(format!("conditional probability {r} outside [0, 1]")));
    }
    Ok(r.clamp(0.0, 1.0))
}

/// Lower-bound feedback rate `I(S1; Ŝ1 | S0)` in bits per sub-channel.
pub fn markov_lb_rate(src: &MarkovSource, jp: &JointReportProbs) -> Result<f64> {
    let q = src.q();
    let given_prev = (1.0 - q) * h2(ratio(jp.q00 + jp.q01, 1.0 - q)?) + q * h2(ratio(jp.q10 + jp.q11, q)?);
    let mut given_both = 0.0;
    for (s0, s1, v) in jp.cells() {
        let cell = src.pair_prob(s0, s1);
        given_both += cell * h2(ratio(v, cell)?);
    }
    Ok((given_prev - given_both).max(0.0))
}

/// Upper-bound feedback rate `I(S1; S2, Ŝ1 | S0)` for reports that depend
/// on the current state only.
pub fn markov_ub_rate(src: &MarkovSource, eps: CrossoverPair) -> Result<f64> {
    CrossoverPair::new(eps.eps0, eps.eps1)?;
    Ok(ub_raw(src, eps.eps0, eps.eps1))
}

fn ub_raw(src: &MarkovSource, eps0: f64, eps1: f64) -> f64 {
    let q = src.q();
    let (d01, d10) = (src.delta01, src.delta10);
    let two_step = q * h2((1.0 - d10).powi(2) + d10 * d01) + (1.0 - q) * h2(d01 * (1.0 - d10) + (1.0 - d01) * d01);
    let report_given_state = q * h2(eps0) + (1.0 - q) * h2(eps1);
    let next_given_state = q * h2(d10) + (1.0 - q) * h2(d01);

    // Paths S0 -> S1 -> S2 split by the middle state; reversibility lets
    // P(S0 = 0, S1 = 1, S2 = 0) be written as q d10^2.
    let mut given_ends = 0.0;
    for (bad_path, good_path, mult) in [
        ((1.0 - d01).powi(2) * (1.0 - q), d10 * d10 * q, 1.0),
        (d01 * (1.0 - d01) * (1.0 - q), d10 * (1.0 - d10) * q, 2.0),
        (d01 * d01 * (1.0 - q), (1.0 - d10).powi(2) * q, 1.0),
    ] {
        let total = bad_path + good_path;
        if total > 0.0 {
            let w = ((1.0 - eps1) * bad_path + eps0 * good_path) / total;
            given_ends += mult * total * h2(w);
        }
    }
    (two_step + given_ends - report_given_state - next_given_state).max(0.0)
}

/// Smallest missed-opportunity probability on the activation line
/// `q(1 - eps0) + (1 - q) eps1 = p` whose upper-bound rate fits in `rf`.
///
/// The upper-bound rate never drops below `I(S1; S2 | S0)`. When `rf` is
/// smaller than that, the independent (no-feedback) pair is returned and
/// the flag is set.
pub fn markov_lower_crossover(src: &MarkovSource, p: f64, rf: f64) -> Result<(CrossoverPair, bool)> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!("p = {p} must lie in (0, 1]")));
    }
    if !(rf >= 0.0) {
        return Err(Error::domain(format!("feedback rate {rf} must be >= 0")));
    }
    let q = src.q();
    let eps1_of = |e0: f64| ((p - q * (1.0 - e0)) / (1.0 - q)).clamp(0.0, 1.0);
    let rate = |e0: f64| ub_raw(src, e0, eps1_of(e0));
    let lo = (1.0 - p / q).max(0.0);
    let hi = 1.0 - p;
    let pair = |e0: f64| CrossoverPair { eps0: e0, eps1: eps1_of(e0) };
    if hi <= lo || rate(lo) <= rf {
        return Ok((pair(lo), false));
    }
    if rate(hi) > rf {
        return Ok((pair(hi), true));
    }
    // First feasible point on a scan, then bisect the crossing before it.
    const SCAN: usize = 64;
    let mut prev = lo;
    let mut first = hi;
    for i in 1..=SCAN {
        let x = lo + (hi - lo) * i as f64 / SCAN as f64;
        if rate(x) <= rf {
            first = x;
            break;
        }
        prev = x;
    }
    let (mut a, mut b) = (prev, first);
    while b - a > 1e-14 * (1.0 + b) {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if rate(m) <= rf {
            b = m;
        } else {
            a = m;
        }
    }
    Ok((pair(b), false))
}

/// Upper and lower bounds on the forward rate for a Markov state source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovBounds {
    pub rate_upper: f64,
    pub rate_lower: f64,
    /// Maximizer of the upper-bound problem.
    pub upper_probs: JointReportProbs,
    /// Crossover pair achieving the lower bound.
    pub lower_eps: CrossoverPair,
    /// The upper-bound optimizer ended on a face of its search box.
    pub upper_on_boundary: bool,
    /// The lower bound fell back to no-feedback activation because `rf`
    /// is below the smallest attainable upper-bound rate.
    pub lower_fallback: bool,
}

/// Forward-rate bounds for a Markov source with good/bad capacities `c1`, `c0`.
///
/// The upper bound splits the joint-probability problem by the previous
/// state: given `S0 = s0` the current state is Bernoulli with a known mean,
/// so each half is an i.i.d. rate-distortion problem. The search runs over
/// how activation and feedback are shared between the halves.
pub fn markov_vq_bounds(src: &MarkovSource, p: f64, c1: f64, c0: f64, rf: f64) -> Result<MarkovBounds> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!("p = {p} must lie in (0, 1]")));
    }
    if !(c0 >= 0.0 && c1 > c0) {
        return Err(Error::domain(format!("capacities need c1 > c0 >= 0 (got {c1}, {c0})")));
    }
    if !(rf >= 0.0) {
        return Err(Error::domain(format!("feedback rate {rf} must be >= 0")));
    }
    let q = src.q();
    let w = [1.0 - q, q];
    let pi = [src.good_given(false), src.good_given(true)];

    // Slice split (p0, rf0) -> crossover pair per slice.
    let split = |p0: f64, rf0: f64| -> Option<[CrossoverPair; 2]> {
        let p1 = ((p - w[0] * p0) / w[1]).min(1.0);
        let rf1 = (rf - w[0] * rf0) / w[1];
        if p1 < -1e-12 || rf1 < -1e-12 {
            return None;
        }
        let mut out = [CrossoverPair { eps0: 0.0, eps1: 0.0 }; 2];
        for (s, (&ps, &rs)) in [p0, p1].iter().zip([rf0, rf1.max(0.0)].iter()).enumerate() {
            out[s] = if ps >= 1.0 {
                CrossoverPair { eps0: 0.0, eps1: 1.0 }
            } else if ps <= 0.0 {
                CrossoverPair { eps0: 1.0, eps1: 0.0 }
            } else {
                crossover_for(pi[s], ps, rs).ok()?
            };
        }
        Some(out)
    };
    let value = |pairs: &[CrossoverPair; 2]| {
        let detected: f64 = (0..2).map(|s| w[s] * pi[s] * (1.0 - pairs[s].eps0)).sum();
        (c1 - c0) * detected + p * c0
    };
    let objective = |x: &[f64]| split(x[0], x[1]).map_or(f64::NEG_INFINITY, |pr| value(&pr));

    let p0_max = (p / w[0]).min(1.0);
    let rf0_max = rf / w[0];
    let opts = BoxOptions { grid: 24, ..BoxOptions::default() };
    let best = maximize_box(objective, &[(0.0, p0_max), (0.0, rf0_max)], &opts)?;
    let (mut x, mut upper, mut on_boundary) = (best.x.clone(), best.value, best.boundary());

    // Proportional split: activation in proportion to the slice means and
    // feedback in proportion to the slice saturation rates. It is exact
    // once the feedback covers both slices.
    let scale = (p / q).min(1.0 / pi[0].max(pi[1]));
    let ps = [pi[0] * scale, pi[1] * scale];
    let sat = [saturation_rate(pi[0], ps[0].max(1e-300)), saturation_rate(pi[1], ps[1].max(1e-300))];
    let total_sat = w[0] * sat[0] + w[1] * sat[1];
    let rf0 = if total_sat > 0.0 { rf * sat[0] / total_sat } else { 0.0 };
    let alt = objective(&[ps[0].min(p0_max), rf0.min(rf0_max)]);
    if alt > upper {
        upper = alt;
        x = vec![ps[0].min(p0_max), rf0.min(rf0_max)];
        on_boundary = false;
    }
    let pairs = split(x[0], x[1]).ok_or_else(|| Error::Infeasible("upper-bound split left the feasible set".into()))?;
    let upper_probs = JointReportProbs {
        q00: w[0] * (1.0 - pi[0]) * (1.0 - pairs[0].eps1),
        q01: w[0] * pi[0] * pairs[0].eps0,
        q10: w[1] * (1.0 - pi[1]) * (1.0 - pairs[1].eps1),
        q11: w[1] * pi[1] * pairs[1].eps0,
    };

    let (lower_eps, lower_fallback) = markov_lower_crossover(src, p, rf)?;
    let rate_lower = q * (1.0 - lower_eps.eps0) * (c1 - c0) + p * c0;
    if rate_lower > upper + 1e-6 {
        return Err(Error::Infeasible(format!(
            "bound ordering violated: lower {rate_lower} exceeds upper {upper}"
        )));
    }
    Ok(MarkovBounds {
        rate_upper: upper,
        rate_lower,
        upper_probs,
        lower_eps,
        upper_on_boundary: on_boundary,
        lower_fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twostate::{mutual_info_rate, vq_forward_rate, TwoStateParams};

    fn src() -> MarkovSource {
        MarkovSource::from_q(0.3, 0.3).unwrap()
    }

    #[test]
    fn zero_error_rates_equal_entropy_rate() {
        let s = src();
        let h = s.entropy_rate();
        assert!((h - 0.6519).abs() < 1e-3, "{h}");
        let lb = markov_lb_rate(&s, &JointReportProbs::zero_error(&s)).unwrap();
        let ub = markov_ub_rate(&s, CrossoverPair { eps0: 0.0, eps1: 0.0 }).unwrap();
        assert!((lb - h).abs() < 1e-12 && (ub - h).abs() < 1e-12, "{lb} {ub} {h}");
    }

    #[test]
    fn deterministic_reports_carry_no_information() {
        let s = src();
        let jp = JointReportProbs::new(&s, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(markov_lb_rate(&s, &jp).unwrap(), 0.0);
        assert!(markov_ub_rate(&s, CrossoverPair { eps0: 0.0, eps1: 1.0 }).unwrap() > 0.0);
    }

    #[test]
    fn lower_rate_never_exceeds_iid_rate_or_upper_rate() {
        let s = src();
        for i in 0..=10 {
            for j in 0..=10 {
                let eps = CrossoverPair { eps0: i as f64 / 10.0, eps1: j as f64 / 10.0 };
                let jp = JointReportProbs::from_crossover(&s, eps);
                let lb = markov_lb_rate(&s, &jp).unwrap();
                let ub = markov_ub_rate(&s, eps).unwrap();
                let iid = mutual_info_rate(s.q(), eps).unwrap();
                assert!(lb <= iid + 1e-12, "{eps:?}: {lb} > {iid}");
                assert!(lb <= ub + 1e-12, "{eps:?}: {lb} > {ub}");
            }
        }
    }

    #[test]
    fn joint_probs_are_validated() {
        let s = src();
        assert!(JointReportProbs::new(&s, 0.9, 0.0, 0.0, 0.0).is_err());
        assert!(JointReportProbs::new(&s, -0.1, 0.0, 0.0, 0.0).is_err());
        assert!(MarkovSource::new(0.0, 0.3).is_err());
    }

    #[test]
    fn saturated_bounds_coincide() {
        let s = src();
        let b = markov_vq_bounds(&s, 0.3, 3.0, 0.0, s.entropy_rate() + 1e-9).unwrap();
        assert!((b.rate_upper - 0.9).abs() < 1e-9, "{b:?}");
        assert!((b.rate_lower - 0.9).abs() < 1e-9, "{b:?}");
        let b = markov_vq_bounds(&s, 0.5, 3.0, 1.0, 1.0).unwrap();
        let expect = 0.3 * 3.0 + 0.2 * 1.0;
        assert!((b.rate_upper - expect).abs() < 1e-9 && (b.rate_lower - expect).abs() < 1e-9, "{b:?}");
    }

    #[test]
    fn gap_at_small_feedback() {
        let s = src();
        let b = markov_vq_bounds(&s, 0.3, 3.0, 0.0, 0.3).unwrap();
        let iid = vq_forward_rate(&TwoStateParams::new(0.3, 0.3, 3.0, 0.0).unwrap(), 0.3).unwrap();
        assert!(b.rate_upper > b.rate_lower, "{b:?}");
        assert!(b.rate_upper >= iid, "{b:?} vs {iid}");
        let jp = b.upper_probs;
        assert!(jp.activation() <= 0.3 + 1e-9);
        assert!(markov_lb_rate(&s, &jp).unwrap() <= 0.3 + 1e-9);
        assert!((jp.detected(&s) * 3.0 - b.rate_upper).abs() < 1e-9);
    }
}
