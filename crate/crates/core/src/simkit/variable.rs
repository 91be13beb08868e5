use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bernoulli_mask, full_mask, run_partitioned, SimReport};
use crate::twostate::{CrossoverPair, TwoStateParams};
use crate::{Error, Result, LOG2_E};

/// Most candidate words drawn for one block before giving up.
pub const DRAW_BUDGET: u64 = 100_000_000;
const MAX_N: usize = 20;
const MIN_TRIALS: u64 = 1000;

/// Target counts `(missed good, active bad)` for a state of `weight` good
/// sub-channels out of `n`, each rounded to the nearest integer.
pub fn composition_targets(eps: CrossoverPair, weight: usize, n: usize) -> (usize, usize) {
    let k0 = (eps.eps0 * weight as f64).round() as usize;
    let k1 = (eps.eps1 * (n - weight) as f64).round() as usize;
    (k0.min(weight), k1.min(n - weight))
}

/// Runs the variable-length scheme: Bernoulli(`p`) words are drawn from a
/// stream both ends can replay until one matches the target compositions,
/// and the draw index is fed back.
///
/// Feedback per block is `log2(index) + log2(n + 1)` bits, the second term
/// paying for the state's weight.
pub fn simulate_variable(params: &TwoStateParams, eps: CrossoverPair, n: usize, trials: u64, seed: u64) -> Result<SimReport> {
    if n == 0 || n > MAX_N {
        return Err(Error::Precondition(format!("variable-length simulation needs 1 <= n <= {MAX_N}, got {n}")));
    }
    if trials < MIN_TRIALS {
        return Err(Error::Precondition(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    CrossoverPair::new(eps.eps0, eps.eps1)?;
    let nf = n as f64;
    let header = (nf + 1.0).log2();
    let all = full_mask(n);
    run_partitioned(trials, seed, |rng, count, stats| {
        for _ in 0..count {
            let s = bernoulli_mask(rng, n, params.q);
            let weight = s.count_ones() as usize;
            let (k0, k1) = composition_targets(eps, weight, n);
            let mut draws = ChaCha8Rng::seed_from_u64(rng.next_u64());
            let mut index = 0u64;
            loop {
                index += 1;
                if index > DRAW_BUDGET {
                    return Err(Error::Budget {
                        what: format!("{DRAW_BUDGET} draws without an admissible word (n = {n}, weight = {weight})"),
                        partial: (stats.feedback.count() > 0).then(|| stats.feedback.mean()),
                    });
                }
                let w = bernoulli_mask(&mut draws, n, params.p);
                if (s & !w).count_ones() as usize == k0 && (!s & all & w).count_ones() as usize == k1 {
                    break;
                }
            }
            let forward = ((weight - k0) as f64 * params.c1 + k1 as f64 * params.c0) / nf;
            stats.push(k0 as f64 / nf, (index as f64).log2() + header, forward);
        }
        Ok(())
    })
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// Expected feedback bits per block of the variable-length scheme at block
/// length `n`: `-Σ_l P(L = l) log2 q_l + log2 e + log2(n + 1) + 1`, where
/// `q_l` is the chance that one Bernoulli(`p`) word is admissible for a
/// state with `l` good sub-channels.
pub fn variable_rate_bound(q: f64, p: f64, eps: CrossoverPair, n: usize) -> Result<f64> {
    if !(q > 0.0 && q < 1.0 && p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("q = {q} and p = {p} must lie in (0, 1)")));
    }
    if n == 0 {
        return Err(Error::domain("block length must be >= 1"));
    }
    CrossoverPair::new(eps.eps0, eps.eps1)?;
    let mut expected = 0.0;
    for l in 0..=n {
        let ln_pl = ln_binomial(n, l) + l as f64 * q.ln() + (n - l) as f64 * (-q).ln_1p();
        let (k0, k1) = composition_targets(eps, l, n);
        let ones = l - k0 + k1;
        let ln_ql = ln_binomial(l, k0) + ln_binomial(n - l, k1) + ones as f64 * p.ln() + (n - ones) as f64 * (-p).ln_1p();
        expected -= ln_pl.exp() * ln_ql * LOG2_E;
    }
    Ok(expected + LOG2_E + (n as f64 + 1.0).log2() + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_reports_are_exact() {
        let params = TwoStateParams::new(0.3, 0.3, 1.0, 0.0).unwrap();
        let r = simulate_variable(&params, CrossoverPair { eps0: 0.0, eps1: 0.0 }, 8, 2000, 3).unwrap();
        assert_eq!(r.mean_distortion, 0.0);
        assert!((r.mean_forward_rate - 0.3).abs() < 3.0 * r.forward_std_error + 1e-12);
    }

    #[test]
    fn distortion_is_the_rounded_target() {
        let params = TwoStateParams::new(0.3, 0.3, 3.0, 0.0).unwrap();
        let eps = CrossoverPair { eps0: 0.25, eps1: 3.0 / 28.0 };
        let n = 12;
        let r = simulate_variable(&params, eps, n, 4000, 5).unwrap();
        // Exact expectation of the rounded missed count under Binomial(n, q).
        let exact: f64 = (0..=n)
            .map(|l| {
                let pl = (ln_binomial(n, l) + l as f64 * 0.3f64.ln() + (n - l) as f64 * 0.7f64.ln()).exp();
                pl * composition_targets(eps, l, n).0 as f64 / n as f64
            })
            .sum();
        assert!((r.mean_distortion - exact).abs() < 3.0 * r.distortion_std_error, "{r:?} vs {exact}");
        let bound = variable_rate_bound(0.3, 0.3, eps, n).unwrap();
        assert!(r.mean_feedback_bits <= bound + 3.0 * r.feedback_std_error, "{r:?} vs {bound}");
    }

    #[test]
    fn guards() {
        let params = TwoStateParams::new(0.3, 0.3, 1.0, 0.0).unwrap();
        let e = CrossoverPair { eps0: 0.1, eps1: 0.1 };
        assert!(simulate_variable(&params, e, 21, 1000, 0).is_err());
        assert!(simulate_variable(&params, e, 10, 10, 0).is_err());
    }
}
