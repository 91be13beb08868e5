use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use super::{solve_crossover, CrossoverPair, TwoStateParams};
use crate::mathkit::binary_entropy_derivative;
use crate::twostate::rd::info_raw;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundScheme {
    Fixed,
    Variable,
}

/// Lower bound on the forward rate of a length-`n` feedback code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteNBound {
    pub n: u64,
    /// Bits per sub-channel, clamped at zero.
    pub rate_lower: f64,
    pub scheme: BoundScheme,
    /// The infinite-length rate the bound approaches.
    pub rate_limit: f64,
    pub eps: CrossoverPair,
    /// Fixed-length only: the simpler large-n form `(1 - 2 sqrt(ln(nq)/(nq))) C`.
    pub large_n: Option<f64>,
}

/// `q [H2'(eps0) + H2'(eps1)]`, which sets the extra-distortion constants.
fn slope_sum(params: &TwoStateParams, eps: &CrossoverPair) -> Result<f64> {
    for (name, e) in [("eps0", eps.eps0), ("eps1", eps.eps1)] {
        if !(e > 0.0 && e < 0.5) {
            return Err(Error::Precondition(format!(
                "finite-length bounds need 0 < {name} < 0.5, solver gave {e}"
            )));
        }
    }
    Ok(params.q * (binary_entropy_derivative(eps.eps0) + binary_entropy_derivative(eps.eps1)))
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("block length n = {n} must be >= 2")));
    }
    Ok(())
}

/// Forward-rate lower bound for a fixed-length constant-composition code.
pub fn fixed_length_lower_bound(params: &TwoStateParams, rf: f64, n: u64) -> Result<FiniteNBound> {
    check_n(n)?;
    let eps = solve_crossover(params, rf)?;
    let slope = slope_sum(params, &eps)?;
    let c = params.rate_at(eps.eps0);
    let nf = n as f64;
    let nq = nf * params.q;
    let k1 = 2.0 / slope;
    let chernoff = if nq > 1.0 { ((2.0 * nq.ln()).sqrt() + 2.0) / nq.sqrt() } else { f64::INFINITY };
    let loss = chernoff + 1.0 / nf + k1 * nf.log2() / nf;
    let large_n = if nq > 1.0 { (1.0 - 2.0 * (nq.ln() / nq).sqrt()).max(0.0) * c } else { 0.0 };
    Ok(FiniteNBound {
        n,
        rate_lower: (c * (1.0 - loss)).max(0.0),
        scheme: BoundScheme::Fixed,
        rate_limit: c,
        eps,
        large_n: Some(large_n),
    })
}

/// Forward-rate lower bound for a variable-length code.
pub fn variable_length_lower_bound(params: &TwoStateParams, rf: f64, n: u64) -> Result<FiniteNBound> {
    check_n(n)?;
    let eps = solve_crossover(params, rf)?;
    let slope = slope_sum(params, &eps)?;
    let c = params.rate_at(eps.eps0);
    let nf = n as f64;
    let loss = 6.0 / slope * nf.log2() / nf;
    Ok(FiniteNBound {
        n,
        rate_lower: (c * (1.0 - loss)).max(0.0),
        scheme: BoundScheme::Variable,
        rate_limit: c,
        eps,
        large_n: None,
    })
}

/// `log2(sqrt(2π) e^{5/12}) - log2(p(1-p)) / 2`, the Stirling slack in the
/// covering probability of a constant-composition codeword.
pub fn robbins_constant(p: f64) -> f64 {
    ((2.0 * PI).sqrt() * E.powf(5.0 / 12.0)).log2() - 0.5 * (p * (1.0 - p)).log2()
}

/// Feedback bits per sub-channel of the random covering codebook of length
/// `n` that leaves at most a `1/n` fraction of typical states uncovered.
pub fn fixed_codebook_rate(q: f64, eps: CrossoverPair, n: u64) -> Result<f64> {
    check_n(n)?;
    let p = eps.activation(q);
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("activation {p} must lie in (0, 1)")));
    }
    let nf = n as f64;
    let k2 = robbins_constant(p);
    Ok(info_raw(q, eps.eps0, eps.eps1) + (nf.log2() + 2.0 * k2 + 2.0 * nf.ln().log2()) / (2.0 * nf))
}
