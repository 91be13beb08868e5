use super::TwoStateParams;
use crate::mathkit::{h2, inv_binary_entropy, Branch};
use crate::{Error, Result};

/// Forward rate of the lossless-source-coding scheme: report a fraction of
/// the good sub-channels, or a fraction of the bad ones, whichever is better.
pub fn lsc_forward_rate(params: &TwoStateParams, rf: f64) -> Result<f64> {
    if !(rf >= 0.0) {
        return Err(Error::domain(format!("feedback rate {rf} must be >= 0")));
    }
    let TwoStateParams { q, p, c1, c0 } = *params;
    let full = rf >= h2(q);
    let reported = |mass: f64| -> Result<f64> {
        if full {
            Ok(mass)
        } else {
            // Fraction of all sub-channels that can be named losslessly at rate rf.
            Ok(inv_binary_entropy(rf.min(1.0), Branch::Lower)?.min(mass))
        }
    };

    // Good-report branch: f q sub-channels are known to be good.
    let fq = reported(q)?;
    let good = if p <= fq {
        p * c1
    } else {
        let rest_good = q - fq;
        let rest = rest_good + (1.0 - q);
        fq * c1 + (p - fq) * (rest_good * c1 + (1.0 - q) * c0) / rest
    };

    // Bad-report branch: f̄ (1-q) sub-channels are known to be bad.
    let fb = reported(1.0 - q)?;
    let unreported = q + (1.0 - q) - fb;
    let bad = if p < unreported {
        p * (q * c1 + (1.0 - q - fb) * c0) / unreported
    } else {
        q * c1 + (p - q) * c0
    };

    Ok(if bad > good { bad } else { good })
}
