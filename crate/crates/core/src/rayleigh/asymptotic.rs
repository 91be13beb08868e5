use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::group::rate;
use super::RayleighSystem;
use crate::mathkit::{find_root, h2, Tolerance};
use crate::{Error, Result, LOG2_E};

const ROOT_TOL: Tolerance = Tolerance { abs: 1e-15, rel: 1e-15, max_iter: 400 };

/// Positive root of `(1 + u) ln(1 + u) = 2u`, about 3.92.
pub fn ustar() -> f64 {
    find_root(|u| (1.0 + u) * u.ln_1p() - 2.0 * u, 1.0, 10.0, ROOT_TOL).expect("bracketed on [1, 10]")
}

/// A regime exponent and how well it solves its defining equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaRoot {
    pub value: f64,
    pub residual: f64,
    /// False when the root falls outside the interval the asymptotics assume.
    pub in_range: bool,
}

fn monotone_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<EtaRoot> {
    let mut bracket = (lo, hi);
    let mut width = hi - lo;
    while f(bracket.0).signum() == f(bracket.1).signum() {
        width *= 2.0;
        if width > 1e4 {
            return Err(Error::Infeasible("no regime exponent solves its equation".into()));
        }
        bracket = (lo - width, hi + width);
    }
    let value = find_root(&f, bracket.0, bracket.1, ROOT_TOL)?;
    Ok(EtaRoot { value, residual: f(value).abs(), in_range: value > lo && value < hi })
}

/// Exponent `η1` of the low/mid regime boundary, from
/// `ln N - ln[(P/u*) (ln N)^{1-η/2}] = (ln N)^{1-η/2}`.
pub fn eta1(n: f64, snr: f64) -> Result<EtaRoot> {
    let l = n.ln();
    let ll = l.ln();
    let us = ustar();
    monotone_root(|e| l - (snr / us).ln() - (1.0 - e / 2.0) * ll - l.powf(1.0 - e / 2.0), 0.0, 2.0)
}

/// Exponent `η2` of the saturation boundary, from
/// `ln N - ln[P (ln N)^{1+η}] = (ln N)^{(1+η)/2}`.
pub fn eta2(n: f64, snr: f64) -> Result<EtaRoot> {
    let l = n.ln();
    let ll = l.ln();
    monotone_root(|e| l - snr.ln() - (1.0 + e) * ll - l.powf((1.0 + e) / 2.0), 0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Low,
    Mid,
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRegime {
    pub regime: Regime,
    /// Low/mid boundary in bits per block.
    pub b1: f64,
    /// Saturation boundary in bits per block.
    pub bmax: f64,
    pub eta1: EtaRoot,
    pub eta2: EtaRoot,
    pub ustar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSolution {
    pub regime: AsymptoticRegime,
    pub t_star: f64,
    pub m_star: f64,
    /// Exact group rate at `(m_star, t_star)`, bits per channel use (all sub-channels).
    pub c_star: f64,
    /// Closed-form large-`N` rate of the regime, bits per channel use (all sub-channels).
    pub c_formula: f64,
    /// Feedback bits per block used at `(m_star, t_star)`.
    pub feedback_bits: f64,
}

/// Large-`N` optimum of group loading at a budget of `b` bits per block.
///
/// The closed forms count feedback in nats, so `b` is converted first.
pub fn group_asymptotic(sys: &RayleighSystem, b: f64) -> Result<AsymptoticSolution> {
    if !(b > 0.0) {
        return Err(Error::domain(format!("feedback budget b = {b} must be positive")));
    }
    let (n, p) = (sys.nf(), sys.snr);
    if n < 3.0 {
        return Err(Error::domain("asymptotic regimes need n >= 3"));
    }
    let l = n.ln();
    let ll = l.ln();
    let us = ustar();
    let e1 = eta1(n, p)?;
    let e2 = eta2(n, p)?;
    let b1 = p / us * l.powf(2.0 - e1.value);
    let bmax = p * l.powf(2.0 + e2.value);
    let bn = b * LN_2;
    let regime = if bn < b1 {
        Regime::Low
    } else if bn < bmax {
        Regime::Mid
    } else {
        Regime::Saturated
    };
    let (t, m, c) = match regime {
        Regime::Low => {
            let w = (p * bn / us).sqrt();
            let m = ((p / (us * bn)).sqrt() * (n / w).ln()).max(1.0);
            ((us * bn / p).sqrt(), m, w * us.ln_1p())
        }
        Regime::Mid => {
            let t = (n * l / bn).ln();
            (t, 1.0, bn / l * (1.0 + p * l / bn * t).ln())
        }
        Regime::Saturated => (l - (1.0 + e2.value) * ll - p.ln(), 1.0, p * (l - (1.0 + e2.value) * ll)),
    };
    let t = t.max(0.0);
    let m = m.min(n);
    Ok(AsymptoticSolution {
        regime: AsymptoticRegime { regime, b1: b1 / LN_2, bmax: bmax / LN_2, eta1: e1, eta2: e2, ustar: us },
        t_star: t,
        m_star: m,
        c_star: rate(sys, m, t),
        c_formula: c * LOG2_E,
        feedback_bits: n / m * h2((-m * t).exp()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ustar_value() {
        let u = ustar();
        assert!((u - 3.9216).abs() < 1e-3, "{u}");
        assert!(((1.0 + u) * u.ln_1p() - 2.0 * u).abs() < 1e-12);
    }

    #[test]
    fn exponents_at_five_db() {
        let p = RayleighSystem::db_to_linear(5.0);
        let a = eta1(500.0, p).unwrap();
        let b = eta2(500.0, p).unwrap();
        assert!(a.residual < 1e-8 && b.residual < 1e-8);
        assert!(a.in_range && b.in_range);
        assert!((a.value - 0.25).abs() < 0.1 && (b.value - 0.25).abs() < 0.1, "{a:?} {b:?}");
    }

    #[test]
    fn eta2_leaves_its_range_at_high_snr() {
        let b = eta2(500.0, 100.0).unwrap();
        assert!(!b.in_range && b.residual < 1e-8, "{b:?}");
    }

    #[test]
    fn regimes_are_ordered() {
        let sys = RayleighSystem::independent(500, RayleighSystem::db_to_linear(5.0)).unwrap();
        let lo = group_asymptotic(&sys, 10.0).unwrap();
        let hi = group_asymptotic(&sys, 1000.0).unwrap();
        assert_eq!(lo.regime.regime, Regime::Low);
        assert_eq!(hi.regime.regime, Regime::Saturated);
        assert!(lo.regime.b1 < lo.regime.bmax);
        let mid = group_asymptotic(&sys, 0.5 * (lo.regime.b1 + lo.regime.bmax)).unwrap();
        assert_eq!(mid.regime.regime, Regime::Mid);
        assert_eq!(mid.m_star, 1.0);
    }
}
