//! Bracketed inversion of monotone scalar maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Bisection runs until the bracket is this small relative to `|r|`;
/// secant steps take over from there.
const SECANT_SWITCH: f64 = 1e-3;
const MAX_ITER: usize = 10_000;

/// Solve `g(r) = target` for `r` in `[lo, hi]` where `g` is monotone in the
/// declared direction.
///
/// The returned `r` comes from a bracket of width at most
/// `tol · |r|` (or two adjacent floats). A value of `g` that falls
/// outside the range spanned by the current bracket ends is reported as a
/// monotonicity violation.
pub fn invert_monotone<T, G>(mut g: G, target: T, (lo, hi): (T, T), direction: Direction, tol: T) -> Result<T>
where
    T: Scalar,
    G: FnMut(T) -> T,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "root bracket ({}, {})",
            lo.as_f64(),
            hi.as_f64()
        )));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter("root tolerance must be positive".into()));
    }
    // h is increasing with a root at the solution
    let sign = match direction {
        Direction::Increasing => T::one(),
        Direction::Decreasing => -T::one(),
    };
    let mut h = |x: T| -> Result<T> {
        let v = g(x);
        if v.is_nan() {
            return Err(Error::Evaluation(format!("g({}) is NaN", x.as_f64())));
        }
        Ok(sign * (v - target))
    };

    let (mut a, mut b) = (lo, hi);
    let (mut ha, mut hb) = (h(a)?, h(b)?);
    if ha > hb {
        return Err(Error::Contract { at: a.as_f64() });
    }
    if ha > T::zero() || hb < T::zero() {
        return Err(Error::Bracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            g_lo: (sign * ha + target).as_f64(),
            g_hi: (sign * hb + target).as_f64(),
            target: target.as_f64(),
        });
    }
    if ha == T::zero() {
        return Ok(a);
    }
    if hb == T::zero() {
        return Ok(b);
    }

    let half = T::lit(0.5);
    let switch = T::lit(SECANT_SWITCH);
    let mut force_bisect = false;
    // Illinois bookkeeping: which end was retained last time
    let mut kept: i8 = 0;
    // unscaled end values, for the monotonicity check
    let (mut true_ha, mut true_hb) = (ha, hb);
    for _ in 0..MAX_ITER {
        let width = b - a;
        let scale = a.abs().max(b.abs());
        if width <= tol * scale {
            break;
        }
        let mid = a + half * width;
        if mid <= a || mid >= b {
            break;
        }
        let secant = !force_bisect && width <= switch * scale;
        let x = if secant {
            let s = b - hb * (b - a) / (hb - ha);
            if s > a && s < b {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        let hx = h(x)?;
        if hx < true_ha || hx > true_hb {
            return Err(Error::Contract { at: x.as_f64() });
        }
        if hx == T::zero() {
            return Ok(x);
        }
        if hx < T::zero() {
            a = x;
            ha = hx;
            true_ha = hx;
            if secant && kept == -1 {
                hb = hb * half;
            }
            kept = -1;
        } else {
            b = x;
            hb = hx;
            true_hb = hx;
            if secant && kept == 1 {
                ha = ha * half;
            }
            kept = 1;
        }
        force_bisect = secant && (b - a) > half * width;
    }
    Ok(if -true_ha < true_hb { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal() {
        let r = invert_monotone(|r: f64| 1.0 / r, 0.5, (1.0, 10.0), Direction::Decreasing, 1e-14).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_square() {
        let r = invert_monotone(
            |r: f64| r.powi(-2),
            4.0,
            (0.01, 1.0),
            Direction::Decreasing,
            1e-14,
        )
        .unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn log_over_r() {
        // mpmath findroot: ln(r)/r = 0.1 on the decreasing branch
        let want = 35.771_520_639_572_97;
        let e = std::f64::consts::E;
        let r = invert_monotone(|r: f64| r.ln() / r, 0.1, (e, 1e6), Direction::Decreasing, 1e-14).unwrap();
        assert!((r - want).abs() < 1e-10 * want);
        assert!((r.ln() / r - 0.1).abs() < 1e-14);
    }

    #[test]
    fn increasing_and_endpoint_hits() {
        let r = invert_monotone(|x: f64| x * x * x, 8.0, (0.0, 3.0), Direction::Increasing, 1e-15).unwrap();
        assert!((r - 2.0).abs() < 1e-13);
        let r = invert_monotone(|x: f64| x, 0.0, (0.0, 3.0), Direction::Increasing, 1e-15).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn no_straddle() {
        let err = invert_monotone(|x: f64| x, 5.0, (0.0, 3.0), Direction::Increasing, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn wrong_direction_detected() {
        let err = invert_monotone(|x: f64| x, 1.0, (0.0, 3.0), Direction::Decreasing, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Contract { .. }));
    }

    #[test]
    fn non_monotone_detected() {
        // dips below g(lo) inside the bracket
        let err = invert_monotone(
            |x: f64| if (0.4..0.6).contains(&x) { -10.0 } else { x },
            0.75,
            (0.0, 1.0),
            Direction::Increasing,
            1e-12,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Contract { .. }));
    }

    #[test]
    fn refinement_is_idempotent() {
        let g = |r: f64| r.ln() / r;
        let r = invert_monotone(g, 0.1, (3.0, 1e6), Direction::Decreasing, 1e-13).unwrap();
        let w = 1e-6 * r;
        let r2 = invert_monotone(g, 0.1, (r - w, r + w), Direction::Decreasing, 1e-13).unwrap();
        assert!((r - r2).abs() <= 1e-13 * r * 4.0);
    }
}
