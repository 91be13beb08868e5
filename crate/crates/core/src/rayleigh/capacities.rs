use super::RayleighSystem;
use crate::mathkit::{head_log_integral, tail_log_integral_scaled};
use crate::{Error, Result, LOG2_E};

/// Mean capacities `(c1, c0)` in bits per use of a good and a bad
/// sub-channel when a fraction `p` is active and the threshold is `t`.
pub fn good_bad_capacities(sys: &RayleighSystem, p: f64, t: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!("p = {p} must lie in (0, 1]")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("threshold t = {t} must be finite and >= 0")));
    }
    caps(sys, p, t)
}

pub(crate) fn caps(sys: &RayleighSystem, p: f64, t: f64) -> Result<(f64, f64)> {
    let a = sys.snr / (sys.nf() * p);
    // (1/q) ∫_t^∞ e^{-τ} ln(1 + aτ) dτ with q = e^{-t}.
    let c1 = tail_log_integral_scaled(t, a)? * LOG2_E;
    let c0 = if t == 0.0 { 0.0 } else { head_log_integral(t, a)? / (-(-t).exp_m1()) * LOG2_E };
    Ok((c1, c0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathkit::{exp1_scaled, integrate, tail_log_integral};

    #[test]
    fn zero_threshold() {
        let sys = RayleighSystem::independent(500, 100.0).unwrap();
        let (c1, c0) = good_bad_capacities(&sys, 0.2, 0.0).unwrap();
        assert_eq!(c0, 0.0);
        let a: f64 = 100.0 / 100.0;
        assert!((c1 - exp1_scaled(1.0 / a) * LOG2_E).abs() < 1e-12);
    }

    #[test]
    fn quadrature_oracle() {
        let sys = RayleighSystem::independent(500, 100.0).unwrap();
        let t = 1.203_972_804_325_935_9;
        let (c1, c0) = good_bad_capacities(&sys, 0.1, t).unwrap();
        let f = |x: f64| (-x).exp() * (2.0 * x).ln_1p();
        let good = integrate(f, t, t + 50.0, 1e-14, 1e-13, 500).unwrap().value / 0.3;
        let bad = integrate(f, 0.0, t, 1e-14, 1e-13, 500).unwrap().value / 0.7;
        assert!((c1 / LOG2_E - good).abs() < 1e-10 && (good - 1.634).abs() < 0.01 * 1.634);
        assert!((c0 / LOG2_E - bad).abs() < 1e-10 && (bad - 0.618).abs() < 0.01 * 0.618);
    }

    #[test]
    fn total_expectation() {
        let sys = RayleighSystem::independent(64, 10.0).unwrap();
        for &p in &[0.05, 0.3, 1.0] {
            for &t in &[1e-4, 0.3, 1.0, 4.0, 12.0] {
                let q = (-t as f64).exp();
                let (c1, c0) = good_bad_capacities(&sys, p, t).unwrap();
                let total = tail_log_integral(0.0, 10.0 / (64.0 * p)).unwrap() * LOG2_E;
                assert!((q * c1 + (1.0 - q) * c0 - total).abs() < 1e-8, "p={p} t={t}");
            }
        }
    }
}
