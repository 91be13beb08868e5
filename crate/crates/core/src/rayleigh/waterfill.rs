use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RayleighSystem;
use crate::mathkit::RunningStats;
use crate::{Error, Result};

/// Fewest Monte Carlo blocks accepted for the reference.
pub const MIN_SAMPLES: u64 = 10_000;
const PARTITIONS: u64 = 64;

/// Capacity in bits per use of parallel channels with gains `gains` under a
/// total power `snr`, with the optimal (water-filling) power split.
pub fn waterfill_sum_rate(gains: &[f64], snr: f64) -> f64 {
    let mut inv: Vec<f64> = gains.iter().filter(|g| **g > 0.0).map(|g| 1.0 / g).collect();
    inv.sort_by(f64::total_cmp);
    // Water level with the k strongest channels active: (P + Σ 1/g) / k.
    let mut level = f64::INFINITY;
    let mut active = 0;
    let mut acc = 0.0;
    for (k, x) in inv.iter().enumerate() {
        if *x >= level {
            break;
        }
        acc += x;
        active = k + 1;
        level = (snr + acc) / active as f64;
    }
    inv[..active].iter().map(|x| (level / x).log2()).sum()
}

/// Monte Carlo water-filling capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaterfillReport {
    /// Bits per channel use over all sub-channels.
    pub total: f64,
    pub total_std_error: f64,
    /// Bits per sub-channel per use.
    pub per_subchannel: f64,
    pub per_subchannel_std_error: f64,
    pub samples: u64,
}

/// Unit-mean exponential gains; adjacent coefficients are AR(1) when `alpha > 0`.
pub(crate) fn draw_gains<R: Rng>(rng: &mut R, n: usize, alpha: f64, out: &mut Vec<f64>) {
    out.clear();
    if alpha == 0.0 {
        out.extend((0..n).map(|_| -> f64 { Exp1.sample(rng) }));
        return;
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let w = (1.0 - alpha * alpha).sqrt();
    let mut re: f64 = s * rng.sample::<f64, _>(StandardNormal);
    let mut im: f64 = s * rng.sample::<f64, _>(StandardNormal);
    for _ in 0..n {
        out.push(re * re + im * im);
        re = alpha * re + w * s * rng.sample::<f64, _>(StandardNormal);
        im = alpha * im + w * s * rng.sample::<f64, _>(StandardNormal);
    }
}

/// Water-filling capacity averaged over `samples` random gain vectors.
///
/// Blocks are split into fixed partitions seeded from `(seed, partition)`,
/// so the result does not depend on the number of worker threads.
pub fn waterfilling_reference(sys: &RayleighSystem, samples: u64, seed: u64) -> Result<WaterfillReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::Precondition(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let n = sys.n as usize;
    let parts: Vec<RunningStats> = (0..PARTITIONS)
        .into_par_iter()
        .map(|part| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(part);
            let count = samples / PARTITIONS + u64::from(part < samples % PARTITIONS);
            let mut gains = Vec::with_capacity(n);
            let mut stats = RunningStats::new();
            for _ in 0..count {
                draw_gains(&mut rng, n, sys.alpha, &mut gains);
                stats.push(waterfill_sum_rate(&gains, sys.snr));
            }
            stats
        })
        .collect();
    let mut all = RunningStats::new();
    parts.iter().for_each(|p| all.merge(p));
    let nf = sys.nf();
    Ok(WaterfillReport {
        total: all.mean(),
        total_std_error: all.std_error(),
        per_subchannel: all.mean() / nf,
        per_subchannel_std_error: all.std_error() / nf,
        samples,
    })
}
