//! Two-state (good/bad) sub-channels: rate-distortion optimal feedback,
//! the LSC comparison scheme, finite-length bounds and Markov-source bounds.

mod finite;
mod lsc;
mod markov;
pub(crate) mod rd;

pub use finite::{
    fixed_codebook_rate, fixed_length_lower_bound, robbins_constant, variable_length_lower_bound, BoundScheme,
    FiniteNBound,
};
pub use lsc::lsc_forward_rate;
pub use markov::{
    markov_lb_rate, markov_lower_crossover, markov_ub_rate, markov_vq_bounds, JointReportProbs, MarkovBounds,
    MarkovSource,
};
pub use rd::{
    crossover_for, distortion_rate, max_useful_feedback, mutual_info_rate, solve_crossover, vq_forward_rate,
    CrossoverPair, TwoStateParams,
};
