use std::f64::consts::{LN_2, PI};

use super::quad::integrate;
use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("binary_entropy argument {x} outside [0, 1]")));
    }
    Ok(h2(x))
}

/// Unchecked binary entropy; the argument is clamped to [0, 1].
#[inline]
pub fn h2(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -(x * x.ln() + (1.0 - x) * (-x).ln_1p()) / LN_2
}

/// `d/dx H2(x) = log2((1 - x) / x)`.
pub fn binary_entropy_derivative(x: f64) -> f64 {
    ((1.0 - x) / x).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Branch {
    /// Solution in [0, 1/2].
    Lower,
    /// Solution in [1/2, 1].
    Upper,
}

/// Inverse of the binary entropy on the requested branch.
pub fn inv_binary_entropy(y: f64, branch: Branch) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::domain(format!("inv_binary_entropy argument {y} outside [0, 1]")));
    }
    let x = if y == 0.0 {
        0.0
    } else if y == 1.0 {
        0.5
    } else {
        // H2 is strictly increasing on [0, 1/2]; bisect to the last ulp.
        let (mut lo, mut hi) = (0.0f64, 0.5f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h2(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(match branch {
        Branch::Lower => x,
        Branch::Upper => 1.0 - x,
    })
}

/// Exponential integral `E1(x)` for `x > 0`.
pub fn exp1(x: f64) -> f64 {
    if x <= 1.0 {
        exp1_series(x)
    } else if x > 745.0 {
        0.0
    } else {
        (-x).exp() * exp1_cf(x)
    }
}

/// `e^x E1(x)`, finite for all `x > 0`.
pub fn exp1_scaled(x: f64) -> f64 {
    if x <= 1.0 {
        x.exp() * exp1_series(x)
    } else {
        exp1_cf(x)
    }
}

fn exp1_series(x: f64) -> f64 {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// Continued fraction for `e^x E1(x)`, modified Lentz.
fn exp1_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// `∫_t^∞ e^{-τ} ln(1 + aτ) dτ` in nats.
pub fn tail_log_integral(t: f64, a: f64) -> Result<f64> {
    check_tail_args(t, a)?;
    let s = tail_log_integral_scaled(t, a)?;
    Ok(if t > 745.0 { 0.0 } else { (-t).exp() * s })
}

/// `e^t ∫_t^∞ e^{-τ} ln(1 + aτ) dτ = ln(1 + at) + e^x E1(x)` with `x = t + 1/a`.
pub fn tail_log_integral_scaled(t: f64, a: f64) -> Result<f64> {
    check_tail_args(t, a)?;
    let x = t + 1.0 / a;
    Ok((a * t).ln_1p() + exp1_scaled(x))
}

/// `∫_0^t e^{-τ} ln(1 + aτ) dτ` in nats.
///
/// The closed-form difference cancels badly for small `t`, so short
/// intervals go through quadrature.
pub fn head_log_integral(t: f64, a: f64) -> Result<f64> {
    check_tail_args(t, a)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if t > 2.0 {
        return Ok(tail_log_integral(0.0, a)? - tail_log_integral(t, a)?);
    }
    let q = integrate(|tau| (-tau).exp() * (a * tau).ln_1p(), 0.0, t, 0.0, 1e-13, 200)?;
    Ok(q.value)
}

fn check_tail_args(t: f64, a: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("threshold t = {t} must be >= 0")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("scale a = {a} must be positive and finite")));
    }
    Ok(())
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    Ok(if x <= 15.0 { i0_series(x) } else { x.exp() * i0e_asymptotic(x) })
}

/// `e^{-x} I0(x)`.
pub fn bessel_i0e(x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    Ok(if x <= 15.0 { (-x).exp() * i0_series(x) } else { i0e_asymptotic(x) })
}

fn check_bessel_arg(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("bessel_i0 argument {x} must be >= 0")));
    }
    Ok(())
}

fn i0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= y / (kf * kf);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// `e^{-x} I0(x) ~ (2πx)^{-1/2} Σ ((2k-1)!!)^2 / (k! (8x)^k)`, truncated at the smallest term.
fn i0e_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.3).unwrap() - 0.881_290_899_230_692_7).abs() < 1e-14);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn inverse_entropy_examples() {
        assert_eq!(inv_binary_entropy(1.0, Branch::Lower).unwrap(), 0.5);
        let lo = inv_binary_entropy(0.4, Branch::Lower).unwrap();
        let hi = inv_binary_entropy(0.4, Branch::Upper).unwrap();
        assert!((lo - 0.0797).abs() < 1e-3, "{lo}");
        assert!((hi - 0.9203).abs() < 1e-3, "{hi}");
        assert!(inv_binary_entropy(1.2, Branch::Upper).is_err());
    }

    #[test]
    fn exp1_reference_values() {
        // Abramowitz & Stegun table 5.1.
        assert!((exp1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((exp1(0.5) - 0.559_773_594_776_160_8).abs() < 1e-15);
        assert!((exp1(2.0) - 0.048_900_510_708_061_12).abs() < 1e-16);
        assert!((exp1_scaled(10.0) - 0.091_563_333_939_788_08).abs() < 1e-15);
        // Both branches agree near the switch.
        let below = exp1_series(1.0 + 1e-9) * (1.0 + 1e-9f64).exp();
        let above = exp1_cf(1.0 + 1e-9);
        assert!((below - above).abs() < 1e-13);
    }

    #[test]
    fn bessel_examples() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert!((bessel_i0(1.0).unwrap() - 1.266_065_877_752_008_4).abs() < 1e-14);
        let lead = 30f64.exp() / (60.0 * PI).sqrt();
        assert!((bessel_i0(30.0).unwrap() / lead - 1.0).abs() < 0.005);
        // Continuity across the series/asymptotic switch.
        let a = i0_series(15.0) * (-15f64).exp();
        let b = i0e_asymptotic(15.0);
        assert!((a / b - 1.0).abs() < 1e-12, "{a} {b}");
        assert!(bessel_i0(-1.0).is_err());
    }

    #[test]
    fn tail_examples() {
        assert!(tail_log_integral(700.0, 1.0).unwrap().abs() < 1e-12);
        let small = tail_log_integral(0.0, 1e-3).unwrap();
        assert!((small / 1e-3 - 1.0).abs() < 0.01);
        assert!((tail_log_integral(0.0, 2.0).unwrap() - 0.9230).abs() < 1e-3);
        assert!(tail_log_integral(-1.0, 1.0).is_err());
        assert!(tail_log_integral(1.0, 0.0).is_err());
    }

    #[test]
    fn head_plus_tail_is_total() {
        for &a in &[1e-3, 0.2, 2.0, 50.0, 1e3] {
            for &t in &[1e-6, 0.01, 0.7, 1.9, 2.1, 6.0] {
                let sum = head_log_integral(t, a).unwrap() + tail_log_integral(t, a).unwrap();
                let total = tail_log_integral(0.0, a).unwrap();
                assert!((sum - total).abs() < 1e-12 * total.max(1.0), "t={t} a={a}");
            }
        }
    }
}
