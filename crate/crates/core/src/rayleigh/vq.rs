use super::capacities::caps;
use super::{RayleighSystem, ThresholdPolicy};
use crate::mathkit::{binary_entropy_derivative, maximize_box, BoxOptions};
use crate::twostate::rd::info_raw;
use crate::twostate::{crossover_for, BoundScheme, CrossoverPair};
use crate::{Error, Result};

/// Smallest activation fraction searched.
pub(crate) const P_MIN: f64 = 1e-4;

pub(crate) struct Point {
    pub q: f64,
    pub eps: CrossoverPair,
    pub c1: f64,
    pub c0: f64,
    pub rate: f64,
}

/// Forward rate of the rate-distortion optimal quantizer at `(p, t)`.
pub(crate) fn vq_point(sys: &RayleighSystem, p: f64, t: f64, rf: f64) -> Result<Point> {
    let (c1, c0) = caps(sys, p, t)?;
    let q = (-t).exp();
    let eps = if p >= 1.0 {
        CrossoverPair { eps0: 0.0, eps1: 1.0 }
    } else if q >= 1.0 - 1e-12 {
        // Everything is good: any activation pattern detects a fraction p.
        CrossoverPair { eps0: 1.0 - p, eps1: 0.0 }
    } else {
        crossover_for(q, p, rf)?
    };
    let rate = q * (1.0 - eps.eps0) * (c1 - c0) + p * c0;
    Ok(Point { q, eps, c1, c0, rate })
}

fn check(sys: &RayleighSystem, rf: f64) -> Result<()> {
    if sys.alpha != 0.0 {
        return Err(Error::Precondition("independent sub-channels required (alpha = 0)".into()));
    }
    if !(rf >= 0.0) {
        return Err(Error::domain(format!("feedback rate {rf} must be >= 0")));
    }
    Ok(())
}

fn policy(sys: &RayleighSystem, x: &[f64], rf: f64, on_boundary: bool) -> Result<ThresholdPolicy> {
    let pt = vq_point(sys, x[0], x[1], rf)?;
    Ok(ThresholdPolicy {
        t: x[1],
        q: pt.q,
        p: x[0],
        eps: pt.eps,
        c1: pt.c1,
        c0: pt.c0,
        forward_rate: pt.rate,
        feedback_rate: info_raw(pt.q, pt.eps.eps0, pt.eps.eps1).min(rf),
        on_boundary,
    })
}

/// Maximizes the threshold-scheme forward rate over `(p, t)` at feedback
/// rate `rf` bits per sub-channel.
pub fn vq_optimize(sys: &RayleighSystem, rf: f64) -> Result<ThresholdPolicy> {
    check(sys, rf)?;
    let f = |x: &[f64]| vq_point(sys, x[0], x[1], rf).map_or(f64::NEG_INFINITY, |pt| pt.rate);
    let (x, boundary) = search(sys, f, &BoxOptions::default())?;
    policy(sys, &x, rf, boundary)
}

/// Box search over `(p, t)` plus a line search along the ridge
/// `p = e^{-t}`, where zero-error reports become affordable and coordinate
/// moves converge slowly.
fn search(sys: &RayleighSystem, f: impl Fn(&[f64]) -> f64, opts: &BoxOptions) -> Result<(Vec<f64>, bool)> {
    let best = maximize_box(&f, &[(P_MIN, 1.0), (0.0, sys.t_max())], opts);
    // Parametrized by sqrt(t): optima at small budgets sit near t = 0.
    let on_ridge = |u: f64| [(-u * u).exp().max(P_MIN), u * u];
    let ridge = maximize_box(|x: &[f64]| f(&on_ridge(x[0])), &[(0.0, sys.t_max().sqrt())], &BoxOptions::default());
    match (best, ridge) {
        (Ok(b), Ok(r)) if r.value > b.value => Ok((on_ridge(r.x[0]).to_vec(), false)),
        (Ok(b), _) => Ok((b.x.clone(), b.boundary())),
        (Err(_), Ok(r)) => Ok((on_ridge(r.x[0]).to_vec(), false)),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Finite-length bound at `(p, t)` and the crossover pair it uses.
fn lower_point(sys: &RayleighSystem, p: f64, t: f64, rf: f64, scheme: BoundScheme) -> Option<(f64, Point)> {
    let mut pt = vq_point(sys, p, t, rf).ok()?;
    let (n, q) = (sys.nf(), pt.q);
    if q >= 1.0 || p >= 1.0 {
        return None;
    }
    // At least one expected error in each part. Raising eps0 along the
    // activation line needs less feedback, so the clamped pair is still
    // affordable at `rf`.
    let floor0 = 1.0 / (q * n);
    let floor1 = 1.0 / ((1.0 - q) * n);
    let eps0 = pt.eps.eps0.max(floor0).max(1.0 - (p - (1.0 - q) * floor1) / q);
    let eps1 = (p - q * (1.0 - eps0)) / (1.0 - q);
    if !(eps0 < 0.5 && eps0 <= 1.0 - p && eps1 >= floor1 * (1.0 - 1e-9) && eps1 < 0.5) {
        return None;
    }
    pt.eps = CrossoverPair { eps0, eps1 };
    pt.rate = q * (1.0 - eps0) * (pt.c1 - pt.c0) + p * pt.c0;
    let slope = q * (binary_entropy_derivative(eps0) + binary_entropy_derivative(eps1));
    let loss = match scheme {
        BoundScheme::Variable => 6.0 / slope * n.log2() / n,
        BoundScheme::Fixed => {
            let nq = n * q;
            if nq <= 1.0 {
                return None;
            }
            ((2.0 * nq.ln()).sqrt() + 2.0) / nq.sqrt() + 1.0 / n + 2.0 / slope * n.log2() / n
        }
    };
    Some(((pt.rate * (1.0 - loss)).max(0.0), pt))
}

/// Maximizes a finite-length lower bound over `(p, t)`.
///
/// The bounds hold at every `(p, t)` where the crossover pair lies in
/// `(0, 1/2)`, so the best of them is itself achievable. Pairs are kept at
/// least one expected error per part away from zero.
pub fn vq_lower_bound(sys: &RayleighSystem, rf: f64, scheme: BoundScheme) -> Result<ThresholdPolicy> {
    check(sys, rf)?;
    let f = |x: &[f64]| lower_point(sys, x[0], x[1], rf, scheme).map_or(f64::NEG_INFINITY, |v| v.0);
    let (x, boundary) = search(sys, f, &BoxOptions::default())?;
    let (value, pt) =
        lower_point(sys, x[0], x[1], rf, scheme).ok_or_else(|| Error::Infeasible("no admissible crossover pair".into()))?;
    Ok(ThresholdPolicy {
        t: x[1],
        q: pt.q,
        p: x[0],
        eps: pt.eps,
        c1: pt.c1,
        c0: pt.c0,
        forward_rate: value,
        feedback_rate: info_raw(pt.q, pt.eps.eps0, pt.eps.eps1),
        on_boundary: boundary,
    })
}
