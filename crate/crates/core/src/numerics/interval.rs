use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Interval of exponents with an open right end (possibly `+inf`).
///
/// The left end is open unless `lo_closed` is set; the inner model family is
/// integrable on `[1, b·d)`, so a closed left end at `p = 1` is needed there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Interval<T: Scalar> {
    pub lo: T,
    pub hi: T,
    #[serde(default)]
    pub lo_closed: bool,
}

/// Search bounds produced by [`Interval::search_bounds`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBounds<T> {
    pub lo: T,
    pub hi: T,
    /// `hi` is the `p_max` cap rather than a clipped finite endpoint.
    pub capped: bool,
}

impl<T: Scalar> Interval<T> {
    pub fn open(lo: T, hi: T) -> Result<Self> {
        Self::build(lo, hi, false)
    }

    pub fn closed_open(lo: T, hi: T) -> Result<Self> {
        Self::build(lo, hi, true)
    }

    /// `(lo, +inf)`.
    pub fn unbounded(lo: T) -> Result<Self> {
        Self::build(lo, T::infinity(), false)
    }

    fn build(lo: T, hi: T, lo_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !lo.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interval endpoints ({}, {})",
                lo.as_f64(),
                hi.as_f64()
            )));
        }
        if !(lo < hi) {
            return Err(Error::EmptyInterval(format!(
                "({}, {})",
                lo.as_f64(),
                hi.as_f64()
            )));
        }
        Ok(Self { lo, hi, lo_closed })
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn contains(&self, p: T) -> bool {
        let above = if self.lo_closed { p >= self.lo } else { p > self.lo };
        above && p < self.hi
    }

    pub fn check(&self, p: T, what: &str) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                p: p.as_f64(),
                range: format!("{what} {self}"),
            })
        }
    }

    /// Intersection; `None` when empty.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let hi = self.hi.min(other.hi);
        if lo < hi {
            Some(Self { lo, hi, lo_closed })
        } else {
            None
        }
    }

    /// Shrink both open ends by the relative margin `clip`
    /// (`clip · max(1, |endpoint|)`); an infinite right end is replaced by
    /// `p_max`. Closed ends are kept.
    pub fn search_bounds(&self, clip: T, p_max: T) -> Result<SearchBounds<T>> {
        let one = T::one();
        let lo = if self.lo_closed {
            self.lo
        } else {
            self.lo + clip * self.lo.abs().max(one)
        };
        let (hi, capped) = if self.hi.is_finite() {
            (self.hi - clip * self.hi.abs().max(one), false)
        } else {
            (p_max, true)
        };
        if !(lo < hi) {
            return Err(Error::EmptyInterval(format!(
                "{self} after clipping ({}) and cap ({})",
                clip.as_f64(),
                p_max.as_f64()
            )));
        }
        Ok(SearchBounds { lo, hi, capped })
    }
}

impl<T: Scalar> std::fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        if self.hi.is_finite() {
            write!(f, "{open}{}, {})", self.lo, self.hi)
        } else {
            write!(f, "{open}{}, inf)", self.lo)
        }
    }
}
