//! One-dimensional maximization over an exponent interval.
//!
//! A coarse scan over a grid clustered toward both ends locates the best
//! cell; golden-section search refines inside it; an interior optimum is then
//! polished by solving `h'(p) = 0` on a central-difference derivative, which
//! pins the location well below the `sqrt(eps)` limit of value comparisons.

use serde::{Deserialize, Serialize};

use super::interval::Interval;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryHit {
    #[default]
    None,
    Lower,
    Upper,
}

impl BoundaryHit {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryHit::None => "none",
            BoundaryHit::Lower => "lower",
            BoundaryHit::Upper => "upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OptimResult<T: Scalar> {
    pub argopt: T,
    pub opt_value: T,
    pub converged: bool,
    pub boundary_hit: BoundaryHit,
}

pub const DEFAULT_GRID_SIZE: usize = 256;
pub const DEFAULT_P_MAX: f64 = 1e4;
pub const DEFAULT_CLIP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MaximizeOptions<T: Scalar> {
    pub grid_size: usize,
    pub refine_tol: T,
    /// Relative margin kept away from open endpoints.
    pub clip: T,
    /// Replacement for an infinite right endpoint.
    pub p_max: T,
    pub polish: bool,
}

impl<T: Scalar> Default for MaximizeOptions<T> {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID_SIZE,
            refine_tol: T::lit(1e-10).max(T::epsilon() * T::lit(16.0)),
            clip: T::lit(DEFAULT_CLIP),
            p_max: T::lit(DEFAULT_P_MAX),
            polish: true,
        }
    }
}

/// Points of the coarse scan on `[lo, hi]`, sorted and deduplicated.
pub fn scan_grid<T: Scalar>(lo: T, hi: T, n: usize, log_spaced: bool) -> Vec<T> {
    let n = n.max(3);
    let width = hi - lo;
    let n_body = n / 2;
    let n_end = (n - n_body) / 2;
    let mut pts = Vec::with_capacity(n + 2);
    pts.push(lo);
    pts.push(hi);

    let body_log = log_spaced && lo > T::zero();
    for k in 0..n_body {
        let f = T::from_usize_lossy(k) / T::from_usize_lossy(n_body.max(2) - 1);
        let x = if body_log {
            (lo.ln() + f * (hi.ln() - lo.ln())).exp()
        } else {
            lo + f * width
        };
        pts.push(x);
    }
    // geometric clustering toward the ends
    let d_min = (width * T::lit(1e-12)).max(T::min_positive_value());
    let d_max = width * T::lit(0.5);
    for k in 0..n_end {
        let f = T::from_usize_lossy(k) / T::from_usize_lossy(n_end.max(2) - 1);
        let d = (d_min.ln() + f * (d_max.ln() - d_min.ln())).exp();
        pts.push(lo + d);
        if !log_spaced {
            pts.push(hi - d);
        }
    }
    pts.retain(|x| *x >= lo && *x <= hi);
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    pts.dedup();
    pts
}

/// Maximize `h` over `domain`.
///
/// Open ends are clipped by `opts.clip`, an infinite end is capped at
/// `opts.p_max`. `boundary_hit` reports an optimum within `refine_tol` of a
/// clipped or capped end. NaN evaluations are skipped.
pub fn maximize_scalar<T, H>(
    mut h: H,
    domain: &Interval<T>,
    opts: &MaximizeOptions<T>,
) -> Result<OptimResult<T>>
where
    T: Scalar,
    H: FnMut(T) -> T,
{
    let bounds = domain.search_bounds(opts.clip, opts.p_max)?;
    let (lo, hi) = (bounds.lo, bounds.hi);
    let grid = scan_grid(lo, hi, opts.grid_size, bounds.capped);

    let mut best: Option<(usize, T)> = None;
    for (i, &x) in grid.iter().enumerate() {
        let v = h(x);

        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((i, v));
        }
    }
    let Some((ib, grid_max)) = best else {
        return Err(Error::Evaluation(format!(
            "objective is NaN on the whole grid over {domain}"
        )));
    };

    let mut best_x = grid[ib];
    let mut best_v = grid_max;
    let consider = |x: T, v: T, best_x: &mut T, best_v: &mut T| {
        if v > *best_v {
            *best_x = x;
            *best_v = v;
        }
    };

    // golden section inside the neighbouring cells
    let mut a = grid[ib.saturating_sub(1)];
    let mut b = grid[(ib + 1).min(grid.len() - 1)];
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let scale_of = |x: T| x.abs().max(T::one());
    let mut converged = false;
    if b > a {
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = nan_low(h(c));
        let mut fd = nan_low(h(d));
        consider(c, fc, &mut best_x, &mut best_v);
        consider(d, fd, &mut best_x, &mut best_v);
        for _ in 0..400 {
            if (b - a) <= opts.refine_tol * scale_of(best_x) {
                converged = true;
                break;
            }
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                if !(c > a && c < d) {
                    converged = true;
                    break;
                }
                fc = nan_low(h(c));
                consider(c, fc, &mut best_x, &mut best_v);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                if !(d > c && d < b) {
                    converged = true;
                    break;
                }
                fd = nan_low(h(d));
                consider(d, fd, &mut best_x, &mut best_v);
            }
        }
    } else {
        converged = true;
    }

    let near = |x: T, end: T| (x - end).abs() <= opts.refine_tol * scale_of(end);
    let interior = !near(best_x, lo) && !near(best_x, hi);
    if opts.polish && interior {
        if let Some((xp, vp)) = polish(&mut h, best_x, lo, hi, opts.refine_tol) {
            let slack = T::lit(16.0) * T::epsilon() * best_v.abs().max(T::one());
            if vp >= grid_max && vp >= best_v - slack {
                best_x = xp;
                best_v = vp;
            }
        }
    }

    let boundary_hit = if near(best_x, lo) {
        BoundaryHit::Lower
    } else if near(best_x, hi) {
        BoundaryHit::Upper
    } else {
        BoundaryHit::None
    };
    Ok(OptimResult {
        argopt: best_x,
        opt_value: best_v,
        converged: converged || boundary_hit != BoundaryHit::None,
        boundary_hit,
    })
}

fn nan_low<T: Scalar>(v: T) -> T {
    if v.is_nan() {
        T::neg_infinity()
    } else {
        v
    }
}

/// Root of the derivative around `x`, estimated with the five-point stencil
/// (truncation `O(h⁴)`, so `h ~ ε^{1/5}` balances rounding).
fn polish<T, H>(h: &mut H, x: T, lo: T, hi: T, tol: T) -> Option<(T, T)>
where
    T: Scalar,
    H: FnMut(T) -> T,
{
    let scale = x.abs().max(T::one());
    // the nearest end is usually where the objective's singularity sits, so
    // it sets the length scale of the higher derivatives
    let local = scale.min(x - lo).min(hi - x);
    let step = T::epsilon().powf(T::lit(0.2)) * local;
    let half_width = T::lit(1e-5) * scale;
    let a = (x - half_width).max(lo + step + step);
    let b = (x + half_width).min(hi - step - step);
    if !(a < x && x < b) {
        return None;
    }
    let twelve_step = T::lit(12.0) * step;
    let two_step = step + step;
    let mut deriv = |p: T| {
        (T::lit(8.0) * (h(p + step) - h(p - step)) - (h(p + two_step) - h(p - two_step))) / twelve_step
    };
    let (da, db) = (deriv(a), deriv(b));
    if !(da > T::zero() && db < T::zero()) {
        return None;
    }
    // Plain sign bisection: near the root the stencil is rounding noise, so a
    // monotonicity-checked solver would reject it for no good reason.
    let (mut a, mut b) = (a, b);
    let half = T::lit(0.5);
    while b - a > tol * scale {
        let m = a + half * (b - a);
        if m <= a || m >= b {
            break;
        }
        let dm = deriv(m);
        if dm.is_nan() {
            return None;
        }
        if dm > T::zero() {
            a = m;
        } else {
            b = m;
        }
    }
    let xp = a + half * (b - a);
    let vp = h(xp);
    vp.is_finite().then_some((xp, vp))
}
