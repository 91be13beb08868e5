//! Fixtures shared by the solver benchmarks in `benches/`.

use csflab_core::twostate::MarkovSource;
use csflab_core::{RayleighSystem, TwoStateParams};

/// The 500-sub-channel system at 20 dB used throughout the figures.
pub fn rayleigh_20db() -> RayleighSystem {
    RayleighSystem::independent(500, 100.0).expect("valid system")
}

/// Same system with adjacent coefficients correlated at 0.6.
pub fn rayleigh_correlated() -> RayleighSystem {
    RayleighSystem::new(500, 100.0, 0.6).expect("valid system")
}

pub fn two_state() -> TwoStateParams {
    TwoStateParams::new(0.3, 0.3, 3.0, 0.5).expect("valid parameters")
}

pub fn markov() -> MarkovSource {
    MarkovSource::from_q(0.3, 0.3).expect("valid chain")
}
