//! Monte Carlo checks of the feedback-code constructions at small block
//! lengths, and an exhaustive search for the best constant-composition
//! codebook.
//!
//! Words and state vectors of at most 64 sub-channels are handled as bit
//! masks, bit `i` being sub-channel `i`.

mod codebook;
mod fixed;
mod oracle;
mod states;
mod variable;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::Result;

pub use crate::mathkit::RunningStats;
pub use codebook::{binomial, build_fixed_codebook, build_distinct_codebook, cover_probability, Codebook};
pub use fixed::{simulate_codebook, simulate_fixed, SCAN_BUDGET};
pub use oracle::{exhaustive_codebook_oracle, greedy_codebook_oracle, OracleResult, ORACLE_BUDGET};
pub use states::{gen_states, StateModel, StateVector};
pub use variable::{composition_targets, simulate_variable, variable_rate_bound, DRAW_BUDGET};

/// Summary of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub trials: u64,
    /// Missed opportunities per sub-channel.
    pub mean_distortion: f64,
    pub distortion_std_error: f64,
    /// Feedback bits per block.
    pub mean_feedback_bits: f64,
    pub feedback_std_error: f64,
    /// Forward rate in bits per sub-channel per use.
    pub mean_forward_rate: f64,
    pub forward_std_error: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialStats {
    distortion: RunningStats,
    feedback: RunningStats,
    forward: RunningStats,
}

impl TrialStats {
    fn push(&mut self, distortion: f64, feedback: f64, forward: f64) {
        self.distortion.push(distortion);
        self.feedback.push(feedback);
        self.forward.push(forward);
    }

    fn merge(&mut self, other: &TrialStats) {
        self.distortion.merge(&other.distortion);
        self.feedback.merge(&other.feedback);
        self.forward.merge(&other.forward);
    }

    fn report(&self) -> SimReport {
        SimReport {
            trials: self.distortion.count(),
            mean_distortion: self.distortion.mean(),
            distortion_std_error: self.distortion.std_error(),
            mean_feedback_bits: self.feedback.mean(),
            feedback_std_error: self.feedback.std_error(),
            mean_forward_rate: self.forward.mean(),
            forward_std_error: self.forward.std_error(),
        }
    }
}

const PARTITIONS: u64 = 32;

/// Splits `trials` into fixed partitions, each with its own random stream
/// derived from `(seed, partition)`, and merges the results in partition
/// order so the report does not depend on scheduling.
fn run_partitioned<F>(trials: u64, seed: u64, run: F) -> Result<SimReport>
where
    F: Fn(&mut ChaCha8Rng, u64, &mut TrialStats) -> Result<()> + Sync,
{
    let parts: Vec<Result<TrialStats>> = (0..PARTITIONS)
        .into_par_iter()
        .map(|part| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(part);
            let count = trials / PARTITIONS + u64::from(part < trials % PARTITIONS);
            let mut stats = TrialStats::default();
            run(&mut rng, count, &mut stats)?;
            Ok(stats)
        })
        .collect();
    let mut all = TrialStats::default();
    for p in parts {
        all.merge(&p?);
    }
    Ok(all.report())
}

/// Bernoulli(`q`) state mask of `n` sub-channels.
fn bernoulli_mask<R: rand::Rng>(rng: &mut R, n: usize, q: f64) -> u64 {
    (0..n).fold(0u64, |m, i| if rng.random::<f64>() < q { m | (1 << i) } else { m })
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
