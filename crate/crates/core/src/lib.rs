//! Forward-rate vs. feedback-rate analysis for limited channel-state
//! feedback over multicarrier block-fading channels.
//!
//! * [`mathkit`]: special functions, root finding, quadrature and a box optimizer.
//! * [`twostate`]: good/bad sub-channel rate-distortion analysis, the LSC
//!   comparison scheme, finite-length bounds and Markov-source bounds.
//! * [`rayleigh`]: threshold schemes for Rayleigh sub-channels, group loading,
//!   AR(1) correlation and the water-filling reference.
//! * [`simkit`]: Monte Carlo feedback-code simulators and an exhaustive codebook oracle.
//!
//! Information quantities are in bits; capacity integrals are evaluated in
//! nats and converted with [`LOG2_E`].

pub mod mathkit;
pub mod rayleigh;
pub mod simkit;
pub mod twostate;

mod error;

pub use error::{Error, Result};

pub use mathkit::{binary_entropy, inv_binary_entropy, Branch, Tolerance};
pub use rayleigh::{GroupPolicy, RayleighSystem, ThresholdPolicy};
pub use simkit::{Codebook, SimReport, StateVector};
pub use twostate::{CrossoverPair, FiniteNBound, JointReportProbs, MarkovSource, TwoStateParams};

/// log2(e), the nats-to-bits factor.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;
