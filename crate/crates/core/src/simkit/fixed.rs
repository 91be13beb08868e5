use super::codebook::build_fixed_codebook;
use super::{bernoulli_mask, full_mask, run_partitioned, Codebook, SimReport};
use crate::twostate::TwoStateParams;
use crate::{Error, Result};

/// Largest number of word comparisons (`trials * words`) a run may make.
pub const SCAN_BUDGET: f64 = 2e10;
const MIN_TRIALS: u64 = 1000;

/// Runs a fixed-length code: each Bernoulli(`q`) state is reported by the
/// word that misses the fewest good sub-channels.
pub fn simulate_codebook(params: &TwoStateParams, codebook: &Codebook, trials: u64, seed: u64) -> Result<SimReport> {
    if trials < MIN_TRIALS {
        return Err(Error::Precondition(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let work = trials as f64 * codebook.len() as f64;
    if work > SCAN_BUDGET {
        return Err(Error::Budget { what: format!("nearest-word scan of {work:.3e} comparisons"), partial: None });
    }
    let n = codebook.n;
    let nf = n as f64;
    let bits = codebook.index_bits();
    let all = full_mask(n);
    run_partitioned(trials, seed, |rng, count, stats| {
        for _ in 0..count {
            let s = bernoulli_mask(rng, n, params.q);
            let (i, missed) = codebook.encode(s);
            let w = codebook.words[i];
            let good = (s & w).count_ones() as f64;
            let bad = (!s & all & w).count_ones() as f64;
            stats.push(missed as f64 / nf, bits, (good * params.c1 + bad * params.c0) / nf);
        }
        Ok(())
    })
}

/// Draws a random constant-composition codebook of `m_words` words with
/// `round(p n)` active sub-channels and runs it.
pub fn simulate_fixed(params: &TwoStateParams, n: usize, m_words: usize, trials: u64, seed: u64) -> Result<SimReport> {
    if m_words >= 1 << 16 && n > 24 {
        return Err(Error::Precondition(format!("codebooks of {m_words} words need n <= 24, got {n}")));
    }
    let active = (params.p * n as f64).round().max(1.0) as usize;
    let codebook = build_fixed_codebook(n, active, m_words, seed)?;
    // The state stream must not reuse the codebook's random stream.
    simulate_codebook(params, &codebook, trials, seed.wrapping_add(0x9e37_79b9_7f4a_7c15))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_word_distortion_is_exact() {
        // Word 0b0011 misses good sub-channels 2 and 3: expected 2q/4.
        let params = TwoStateParams::new(0.3, 0.5, 2.0, 0.5).unwrap();
        let cb = Codebook::new(4, 2, vec![0b0011]).unwrap();
        let r = simulate_codebook(&params, &cb, 100_000, 4).unwrap();
        assert!((r.mean_distortion - 0.15).abs() < 3.0 * r.distortion_std_error + 1e-12, "{r:?}");
        // Forward: two active sub-channels, each good w.p. q.
        let fwd = 2.0 * (0.3 * 2.0 + 0.7 * 0.5) / 4.0;
        assert!((r.mean_forward_rate - fwd).abs() < 3.0 * r.forward_std_error + 1e-12);
        assert_eq!(r.mean_feedback_bits, 0.0);
    }

    #[test]
    fn deterministic_and_guarded() {
        let params = TwoStateParams::new(0.3, 0.25, 1.0, 0.0).unwrap();
        let a = simulate_fixed(&params, 12, 64, 2000, 1).unwrap();
        assert_eq!(a, simulate_fixed(&params, 12, 64, 2000, 1).unwrap());
        assert!(simulate_fixed(&params, 12, 64, 999, 1).is_err());
        assert!(simulate_fixed(&params, 30, 1 << 16, 1000, 1).is_err());
    }
}
