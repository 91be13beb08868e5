use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Tolerance;
use crate::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Settings for [`maximize_box`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoxOptions {
    /// Grid points per axis for the start scan.
    pub grid: usize,
    /// Number of best grid points refined by coordinate descent.
    pub starts: usize,
    /// `abs` is the coordinate resolution, `rel` the relative gain below
    /// which a sweep counts as stalled, `max_iter` caps the sweeps per start.
    pub tol: Tolerance,
    /// When set, the start grid is shifted by a random sub-cell offset.
    pub seed: Option<u64>,
}

impl Default for BoxOptions {
    fn default() -> Self {
        BoxOptions { grid: 32, starts: 3, tol: Tolerance { abs: 1e-9, rel: 1e-13, max_iter: 200 }, seed: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxMax {
    pub x: Vec<f64>,
    pub value: f64,
    /// Per axis: the maximizer sits on the lower or upper face.
    pub on_boundary: Vec<bool>,
    pub evaluations: usize,
}

impl BoxMax {
    pub fn boundary(&self) -> bool {
        self.on_boundary.iter().any(|&b| b)
    }
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// The end points are evaluated too, so a monotone objective returns its
/// boundary value exactly. NaN counts as `-inf`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let mut g = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    if hi <= lo {
        return (lo, g(lo));
    }
    let (flo, fhi) = (g(lo), g(hi));
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g(x2);
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if flo > best.1 {
        best = (lo, flo);
    }
    if fhi > best.1 {
        best = (hi, fhi);
    }
    best
}

/// Maximize `f` over a box of up to four dimensions.
///
/// A grid scan picks the start points; each start is refined by coordinate
/// descent with golden-section line searches on local brackets that shrink
/// whenever a sweep stops improving. Points where `f` is `-inf` or NaN are
/// treated as infeasible.
pub fn maximize_box<F: FnMut(&[f64]) -> f64>(mut f: F, bounds: &[(f64, f64)], opts: &BoxOptions) -> Result<BoxMax> {
    let k = bounds.len();
    if k == 0 || k > 4 {
        return Err(Error::domain(format!("maximize_box supports 1 to 4 dimensions, got {k}")));
    }
    if let Some(&(lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::domain(format!("invalid interval [{lo}, {hi}]")));
    }
    if opts.grid == 0 || opts.starts == 0 {
        return Err(Error::domain("grid and starts must be positive"));
    }
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let offsets: Vec<f64> = match opts.seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..k).map(|_| rng.random::<f64>()).collect()
        }
        None => vec![0.0; k],
    };
    let axis_points: Vec<Vec<f64>> = bounds
        .iter()
        .zip(&offsets)
        .map(|(&(lo, hi), &off)| grid_axis(lo, hi, opts.grid, off))
        .collect();

    // Keep the best `starts` grid points.
    let mut best: Vec<(f64, Vec<f64>)> = Vec::with_capacity(opts.starts + 1);
    let mut idx = vec![0usize; k];
    let mut x = vec![0.0; k];
    loop {
        for d in 0..k {
            x[d] = axis_points[d][idx[d]];
        }
        let v = eval(&x);
        if v > f64::NEG_INFINITY && (best.len() < opts.starts || v > best[best.len() - 1].0) {
            let pos = best.iter().position(|(bv, _)| v > *bv).unwrap_or(best.len());
            best.insert(pos, (v, x.clone()));
            best.truncate(opts.starts);
        }
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < axis_points[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == k {
                break;
            }
        }
        if d == k {
            break;
        }
    }
    if best.is_empty() {
        return Err(Error::Infeasible("objective is -inf on every start grid point".into()));
    }

    let cell: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (opts.grid.max(2) - 1) as f64)
        .collect();
    let mut winner: Option<(f64, Vec<f64>)> = None;
    for (v0, x0) in best {
        let (v, x) = coordinate_descent(&mut eval, bounds, x0, v0, &cell, &opts.tol);
        if winner.as_ref().is_none_or(|(bv, _)| v > *bv) {
            winner = Some((v, x));
        }
    }
    let (value, x) = winner.expect("at least one start");
    let on_boundary = x
        .iter()
        .zip(bounds)
        .map(|(&xi, &(lo, hi))| {
            let slack = (10.0 * opts.tol.abs).max(1e-9 * (hi - lo));
            hi > lo && ((xi - lo) <= slack || (hi - xi) <= slack)
        })
        .collect();
    Ok(BoxMax { x, value, on_boundary, evaluations })
}

fn grid_axis(lo: f64, hi: f64, n: usize, offset: f64) -> Vec<f64> {
    if hi == lo || n == 1 {
        return vec![if n == 1 { 0.5 * (lo + hi) } else { lo }];
    }
    if offset == 0.0 {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    } else {
        (0..n).map(|i| lo + (hi - lo) * (i as f64 + offset) / n as f64).collect()
    }
}

fn coordinate_descent<F: FnMut(&[f64]) -> f64>(
    eval: &mut F,
    bounds: &[(f64, f64)],
    mut x: Vec<f64>,
    mut fx: f64,
    cell: &[f64],
    tol: &Tolerance,
) -> (f64, Vec<f64>) {
    let mut h: Vec<f64> = cell.to_vec();
    for _ in 0..tol.max_iter {
        let start = fx;
        let origin = x.clone();
        for d in 0..x.len() {
            let (lo, hi) = bounds[d];
            if hi == lo {
                continue;
            }
            let a = (x[d] - h[d]).max(lo);
            let b = (x[d] + h[d]).min(hi);
            let line_tol = tol.abs.max(1e-3 * h[d]);
            let mut y = x.clone();
            let (xd, v) = golden_max(
                |s| {
                    y[d] = s;
                    eval(&y)
                },
                a,
                b,
                line_tol,
            );
            if v > fx {
                x[d] = xd;
                fx = v;
            }
        }
        // Line search along the net move of the sweep, which follows
        // curved ridges much faster than single-axis steps.
        let step: Vec<f64> = x.iter().zip(&origin).map(|(a, b)| a - b).collect();
        if x.len() > 1 && step.iter().any(|&d| d != 0.0) {
            let mut y = x.clone();
            let project = |s: f64, y: &mut Vec<f64>| {
                for d in 0..y.len() {
                    y[d] = (origin[d] + s * step[d]).clamp(bounds[d].0, bounds[d].1);
                }
            };
            let (s_best, v) = golden_max(
                |s| {
                    project(s, &mut y);
                    eval(&y)
                },
                1.0,
                8.0,
                1e-3,
            );
            if v > fx {
                project(s_best, &mut y);
                x = y;
                fx = v;
            }
        }
        // Shrink each bracket toward the size of the last move; a move that
        // reached the bracket edge keeps (or regains) the wider bracket.
        for d in 0..x.len() {
            let moved = (x[d] - origin[d]).abs();
            let span = bounds[d].1 - bounds[d].0;
            h[d] = if moved >= 0.9 * h[d] {
                (2.0 * h[d]).min(span.max(tol.abs))
            } else {
                (2.0 * moved).clamp(h[d] / 16.0, h[d])
            }
            .max(tol.abs * 0.5);
        }
        let gain = fx - start;
        if gain <= tol.rel * fx.abs().max(1e-300) {
            if h.iter().zip(&x).all(|(&hd, xd)| hd <= tol.abs.max(tol.rel * xd.abs())) {
                break;
            }
            for hd in h.iter_mut() {
                *hd = (*hd * 0.5).max(tol.abs * 0.5);
            }
        }
    }
    (fx, x)
}
