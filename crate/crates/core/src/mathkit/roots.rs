use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Stopping rule shared by the scalar solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_iter: usize) -> Result<Self> {
        if !(abs > 0.0) || !(rel > 0.0) || max_iter == 0 {
            return Err(Error::domain(format!(
                "tolerance needs abs > 0, rel > 0, max_iter >= 1 (got {abs}, {rel}, {max_iter})"
            )));
        }
        Ok(Tolerance { abs, rel, max_iter })
    }

    fn width_ok(&self, a: f64, b: f64) -> bool {
        (b - a).abs() <= self.abs + self.rel * a.abs().max(b.abs()).min(1e300)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-12, rel: 1e-12, max_iter: 200 }
    }
}

/// Root of `f` on `[lo, hi]` by bisection with secant acceleration.
///
/// Secant steps use the Illinois weighting so both bracket ends keep
/// moving; a plain bisection is forced whenever three steps fail to halve
/// the bracket.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<f64> {
    if !(lo <= hi) {
        return Err(Error::domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::domain("function is NaN at a bracket end"));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi, f_lo: fa, f_hi: fb });
    }
    // Weighted end values used by the secant step.
    let (mut ga, mut gb) = (fa, fb);
    let mut last_side = 0i8;
    let mut checkpoint = b - a;
    let mut since_checkpoint = 0;
    for _ in 0..tol.max_iter {
        if tol.width_ok(a, b) {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let secant = (a * gb - b * ga) / (gb - ga);
        let bisect = since_checkpoint >= 3 || !(secant > a && secant < b);
        let x = if bisect { 0.5 * (a + b) } else { secant };
        if bisect {
            checkpoint = b - a;
            since_checkpoint = 0;
        }
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::domain(format!("function is NaN at {x}")));
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            ga = fx;
            if last_side == 1 {
                gb *= 0.5;
            }
            last_side = 1;
        } else {
            b = x;
            fb = fx;
            gb = fx;
            if last_side == -1 {
                ga *= 0.5;
            }
            last_side = -1;
        }
        if b - a <= 0.5 * checkpoint {
            checkpoint = b - a;
            since_checkpoint = 0;
        } else {
            since_checkpoint += 1;
        }
    }
    if tol.width_ok(a, b) {
        return Ok(if fa.abs() < fb.abs() { a } else { b });
    }
    Err(Error::NonConvergence { iterations: tol.max_iter, estimate: 0.5 * (a + b), error: b - a })
}
