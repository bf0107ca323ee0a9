//! Grand Lebesgue norms: generating functions ψ, L^p profiles `p ↦ ‖f‖_p`,
//! the norm `sup_p ‖f‖_p / ψ(p)`, natural functions, and the moment
//! reconstruction of a profile from a tail via Stein's identity.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, TailCurve};
use crate::numerics::{
    integrate, integrate_semi_infinite, maximize_scalar, BoundaryHit, Interval, MaximizeOptions, QuadOptions,
    QuadratureResult, Transform,
};
use crate::scalar::Scalar;

/// Tabulated positive function stored as `ln` values, interpolated linearly
/// in `p`; queries outside the grid are errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LogTable<T: Scalar> {
    p: Vec<T>,
    ln_values: Vec<T>,
}

impl<T: Scalar> LogTable<T> {
    /// Build from `(p, value)` rows; values must be positive.
    pub fn from_values(p: Vec<T>, values: &[T]) -> Result<Self> {
        if p.len() != values.len() || p.len() < 2 {
            return Err(Error::Table("table needs >= 2 rows of (p, value)".into()));
        }
        if p.windows(2).any(|w| !(w[0] < w[1])) || p.iter().any(|x| !x.is_finite()) {
            return Err(Error::Table(
                "p column must be finite and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(Error::Table("values must be finite and positive".into()));
        }
        let ln_values = values.iter().map(|v| v.ln()).collect();
        Ok(Self { p, ln_values })
    }

    pub fn first(&self) -> T {
        self.p[0]
    }

    pub fn last(&self) -> T {
        self.p[self.p.len() - 1]
    }

    pub fn ln_eval(&self, p: T) -> Result<T> {
        if !(p >= self.first() && p <= self.last()) {
            return Err(Error::OutOfRange {
                p: p.as_f64(),
                range: format!("table grid [{}, {}]", self.first(), self.last()),
            });
        }
        let i = self.p.partition_point(|x| *x < p).clamp(1, self.p.len() - 1);
        let (p0, p1) = (self.p[i - 1], self.p[i]);
        let w = (p - p0) / (p1 - p0);
        Ok(self.ln_values[i - 1] + w * (self.ln_values[i] - self.ln_values[i - 1]))
    }
}

/// Where the values of an [`LpProfile`] come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Tabulated,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum ProfileSource<T: Scalar> {
    /// Closed-form norms of a model function.
    Model {
        model: Model<T>,
    },
    Tabulated {
        table: LogTable<T>,
    },
    /// `(p ∫ t^{p-1} T(t) dt)^{1/p}` by quadrature.
    Stein {
        tail: TailCurve<T>,
        rel_tol: T,
    },
    /// `c · base`.
    Scaled {
        factor: T,
        base: Box<LpProfile<T>>,
    },
    /// `ψ · base` for a generating function ψ (e.g. an operator growth law).
    Weighted {
        weight: Box<GeneratingFunction<T>>,
        base: Box<LpProfile<T>>,
    },
}

/// The map `p ↦ ‖f‖_p` on an interval of exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LpProfile<T: Scalar> {
    pub domain: Interval<T>,
    pub source: ProfileSource<T>,
}

impl<T: Scalar> LpProfile<T> {
    pub fn from_model(model: Model<T>) -> Result<Self> {
        Ok(Self {
            domain: model.integrability()?,
            source: ProfileSource::Model { model },
        })
    }

    pub fn tabulated(table: LogTable<T>) -> Result<Self> {
        let domain = Interval::closed_open(table.first(), table.last())?;
        Ok(Self {
            domain,
            source: ProfileSource::Tabulated { table },
        })
    }

    /// Profile reconstructed from a tail on `domain`.
    pub fn from_tail(tail: TailCurve<T>, domain: Interval<T>, rel_tol: T) -> Self {
        Self {
            domain,
            source: ProfileSource::Stein { tail, rel_tol },
        }
    }

    pub fn scaled(self, factor: T) -> Result<Self> {
        if !(factor > T::zero() && factor.is_finite()) {
            return Err(Error::domain("profile scale must be positive", factor.as_f64()));
        }
        Ok(Self {
            domain: self.domain,
            source: ProfileSource::Scaled {
                factor,
                base: Box::new(self),
            },
        })
    }

    /// `p ↦ ψ(p)·‖f‖_p` on the intersection of the domains.
    pub fn weighted(self, weight: GeneratingFunction<T>) -> Result<Self> {
        let domain = self
            .domain
            .intersect(&weight.domain)
            .ok_or_else(|| Error::EmptyInterval(format!("{} ∩ {}", self.domain, weight.domain)))?;
        Ok(Self {
            domain,
            source: ProfileSource::Weighted {
                weight: Box::new(weight),
                base: Box::new(self),
            },
        })
    }

    pub fn provenance(&self) -> Provenance {
        match &self.source {
            ProfileSource::Model { .. } => Provenance::ClosedForm,
            ProfileSource::Tabulated { .. } => Provenance::Tabulated,
            ProfileSource::Stein { .. } => Provenance::Quadrature,
            ProfileSource::Scaled { base, .. } | ProfileSource::Weighted { base, .. } => base.provenance(),
        }
    }

    /// `ln ‖f‖_p`; `-inf` for the zero function.
    pub fn ln_eval(&self, p: T) -> Result<T> {
        self.domain.check(p, "profile domain")?;
        match &self.source {
            ProfileSource::Model { model } => model.ln_lp_norm(p),
            ProfileSource::Tabulated { table } => table.ln_eval(p),
            ProfileSource::Stein { tail, rel_tol } => Ok(ln_stein_norm_pow(tail, p, *rel_tol)? / p),
            ProfileSource::Scaled { factor, base } => Ok(factor.ln() + base.ln_eval(p)?),
            ProfileSource::Weighted { weight, base } => Ok(weight.ln_eval(p)? + base.ln_eval(p)?),
        }
    }

    pub fn eval(&self, p: T) -> Result<T> {
        self.ln_eval(p).map(T::exp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum PsiKind<T: Scalar> {
    /// `ψ ≡ c`.
    Constant {
        value: T,
    },
    /// `c (p - a)^{-α} (b - p)^{-β}`; `b = inf` is allowed only with `β = 0`.
    Parametric {
        a: T,
        b: T,
        alpha: T,
        beta: T,
        scale: T,
    },
    /// `p^{1/m}`.
    Power {
        m: T,
    },
    /// `(p₀ - q)^{-θ/q}` on `(1, p₀)`.
    IwaniecSbordone {
        p0: T,
        theta: T,
    },
    /// `C_d max{p, p/(p-1)}` on `(1, inf)`.
    ClassicalRiesz {
        cd: T,
    },
    /// `ψ(p) = ‖f‖_p` for a profile.
    Natural {
        profile: Box<LpProfile<T>>,
    },
    Product {
        left: Box<GeneratingFunction<T>>,
        right: Box<GeneratingFunction<T>>,
    },
    Scaled {
        factor: T,
        inner: Box<GeneratingFunction<T>>,
    },
    Tabulated {
        table: LogTable<T>,
    },
}

/// A positive weight ψ on an interval of exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GeneratingFunction<T: Scalar> {
    pub domain: Interval<T>,
    pub kind: PsiKind<T>,
}

fn positive<T: Scalar>(x: T, what: &str) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{what} must be positive, got {x}"
        )))
    }
}

fn nonnegative<T: Scalar>(x: T, what: &str) -> Result<()> {
    if x >= T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be >= 0, got {x}")))
    }
}

impl<T: Scalar> GeneratingFunction<T> {
    pub fn constant(value: T, domain: Interval<T>) -> Result<Self> {
        positive(value, "constant psi")?;
        Ok(Self {
            domain,
            kind: PsiKind::Constant { value },
        })
    }

    /// `(p - a)^{-α} (b - p)^{-β}` on `(a, b)`.
    pub fn parametric(a: T, b: T, alpha: T, beta: T) -> Result<Self> {
        Self::parametric_scaled(T::one(), a, b, alpha, beta)
    }

    pub fn parametric_scaled(scale: T, a: T, b: T, alpha: T, beta: T) -> Result<Self> {
        positive(scale, "scale")?;
        nonnegative(alpha, "alpha")?;
        nonnegative(beta, "beta")?;
        if !b.is_finite() && beta > T::zero() {
            return Err(Error::InvalidParameter("b = inf requires beta = 0".into()));
        }
        Ok(Self {
            domain: Interval::open(a, b)?,
            kind: PsiKind::Parametric {
                a,
                b,
                alpha,
                beta,
                scale,
            },
        })
    }

    /// `p^{1/m}` on `[1, inf)`.
    pub fn power(m: T) -> Result<Self> {
        positive(m, "m")?;
        Ok(Self {
            domain: Interval::closed_open(T::one(), T::infinity())?,
            kind: PsiKind::Power { m },
        })
    }

    /// `q ↦ (p₀ - q)^{-θ/q}` on `(1, p₀)`.
    pub fn iwaniec_sbordone(p0: T, theta: T) -> Result<Self> {
        nonnegative(theta, "theta")?;
        Ok(Self {
            domain: Interval::open(T::one(), p0)?,
            kind: PsiKind::IwaniecSbordone { p0, theta },
        })
    }

    pub fn classical_riesz(cd: T) -> Result<Self> {
        positive(cd, "C_d")?;
        Ok(Self {
            domain: Interval::unbounded(T::one())?,
            kind: PsiKind::ClassicalRiesz { cd },
        })
    }

    /// Natural function of a profile, on the profile's own domain.
    pub fn natural(profile: LpProfile<T>) -> Self {
        Self {
            domain: profile.domain,
            kind: PsiKind::Natural {
                profile: Box::new(profile),
            },
        }
    }

    /// Log-linear interpolation of `(p, ψ)` rows; closed on the grid.
    pub fn tabulated(table: LogTable<T>) -> Result<Self> {
        // the right end is a grid point; widen by one ulp-ish step so it is
        // inside the half-open domain
        let hi = table.last() + table.last().abs().max(T::one()) * T::epsilon();
        Ok(Self {
            domain: Interval::closed_open(table.first(), hi)?,
            kind: PsiKind::Tabulated { table },
        })
    }

    /// Pointwise product on the intersection of the domains.
    pub fn product(left: Self, right: Self) -> Result<Self> {
        let domain = left
            .domain
            .intersect(&right.domain)
            .ok_or_else(|| Error::EmptyInterval(format!("{} ∩ {}", left.domain, right.domain)))?;
        Ok(Self {
            domain,
            kind: PsiKind::Product {
                left: Box::new(left),
                right: Box::new(right),
            },
        })
    }

    pub fn scaled(self, factor: T) -> Result<Self> {
        positive(factor, "psi scale")?;
        Ok(Self {
            domain: self.domain,
            kind: PsiKind::Scaled {
                factor,
                inner: Box::new(self),
            },
        })
    }

    /// Same function on a sub-interval.
    pub fn restricted(mut self, domain: Interval<T>) -> Result<Self> {
        self.domain = self
            .domain
            .intersect(&domain)
            .ok_or_else(|| Error::EmptyInterval(format!("{} ∩ {}", self.domain, domain)))?;
        Ok(self)
    }

    /// `ln ψ(p)`.
    pub fn ln_eval(&self, p: T) -> Result<T> {
        self.domain.check(p, "psi domain")?;
        Ok(match &self.kind {
            PsiKind::Constant { value } => value.ln(),
            PsiKind::Parametric {
                a,
                b,
                alpha,
                beta,
                scale,
            } => {
                let mut v = scale.ln();
                if *alpha != T::zero() {
                    v = v - *alpha * (p - *a).ln();
                }
                if *beta != T::zero() {
                    v = v - *beta * (*b - p).ln();
                }
                v
            }
            PsiKind::Power { m } => p.ln() / *m,
            PsiKind::IwaniecSbordone { p0, theta } => -(*theta / p) * (*p0 - p).ln(),
            PsiKind::ClassicalRiesz { cd } => cd.ln() + p.max(p / (p - T::one())).ln(),
            PsiKind::Natural { profile } => profile.ln_eval(p)?,
            PsiKind::Product { left, right } => left.ln_eval(p)? + right.ln_eval(p)?,
            PsiKind::Scaled { factor, inner } => factor.ln() + inner.ln_eval(p)?,
            PsiKind::Tabulated { table } => table.ln_eval(p.min(table.last()))?,
        })
    }

    pub fn eval(&self, p: T) -> Result<T> {
        self.ln_eval(p).map(T::exp)
    }

    /// Check `ψ >= floor` on a search grid over the (clipped) domain;
    /// returns the smallest sampled value.
    pub fn check_floor(&self, floor: T, opts: &MaximizeOptions<T>) -> Result<T> {
        let b = self.domain.search_bounds(opts.clip, opts.p_max)?;
        let grid = crate::numerics::scan_grid(b.lo, b.hi, opts.grid_size, b.capped);
        let mut min = T::infinity();
        for p in grid {
            let v = self.eval(p)?;
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::domain("psi must be finite and positive", p.as_f64()));
            }
            min = min.min(v);
        }
        if min < floor {
            return Err(Error::InvalidParameter(format!(
                "inf psi ~ {min} is below the floor {floor}"
            )));
        }
        Ok(min)
    }
}

/// Natural function `ψ(p) = ‖m‖_p` on the model's integrability interval with
/// open ends pulled in by the relative margin `clip` (of the interval width
/// for bounded intervals, of `max(1, lo)` for unbounded ones). Closed ends
/// are kept.
pub fn natural_function<T: Scalar>(model: &Model<T>, clip: T) -> Result<GeneratingFunction<T>> {
    if !(clip >= T::zero() && clip < T::lit(0.5)) {
        return Err(Error::InvalidParameter(format!(
            "clip must be in [0, 0.5), got {clip}"
        )));
    }
    let full = model.integrability()?;
    let margin = if full.is_bounded() {
        clip * (full.hi - full.lo)
    } else {
        clip * full.lo.abs().max(T::one())
    };
    let lo = if full.lo_closed { full.lo } else { full.lo + margin };
    let hi = if full.is_bounded() {
        full.hi - margin
    } else {
        full.hi
    };
    if !(lo < hi) {
        return Err(Error::EmptyInterval(format!("{full} after clipping by {clip}")));
    }
    let domain = Interval {
        lo,
        hi,
        lo_closed: full.lo_closed,
    };
    let mut profile = LpProfile::from_model(*model)?;
    profile.domain = domain;
    Ok(GeneratingFunction::natural(profile))
}

/// Result of a GLS norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GlsNorm<T: Scalar> {
    /// `sup ‖f‖_p / ψ(p)`, `+inf` when flagged divergent.
    pub value: T,
    /// Log of the largest ratio actually found (finite even when divergent).
    pub ln_value: T,
    pub argmax_p: T,
    pub boundary_hit: BoundaryHit,
    pub divergent: bool,
    pub converged: bool,
}

/// Growth of the log-ratio beyond the clipped end that counts as divergence.
const DIVERGENCE_LN_GROWTH: f64 = 1e-4;

/// `sup_{p} ‖f‖_p / ψ(p)` over the intersection of the domains, maximized
/// in log form.
///
/// If the maximum sits on a clipped or capped end, the ratio is probed
/// 1000× closer to the open end (or 10× beyond the cap); continued growth
/// marks the norm divergent.
pub fn gls_norm<T: Scalar>(
    profile: &LpProfile<T>,
    psi: &GeneratingFunction<T>,
    opts: &MaximizeOptions<T>,
) -> Result<GlsNorm<T>> {
    let domain = profile
        .domain
        .intersect(&psi.domain)
        .ok_or_else(|| Error::EmptyInterval(format!("{} ∩ {}", profile.domain, psi.domain)))?;
    gls_norm_on(profile, psi, &domain, opts, |_, _| {})
}

fn gls_norm_on<T: Scalar>(
    profile: &LpProfile<T>,
    psi: &GeneratingFunction<T>,
    domain: &Interval<T>,
    opts: &MaximizeOptions<T>,
    mut on_error: impl FnMut(T, Error),
) -> Result<GlsNorm<T>> {
    let mut objective = |p: T| match (profile.ln_eval(p), psi.ln_eval(p)) {
        (Ok(w), Ok(s)) => w - s,
        (Err(e), _) | (_, Err(e)) => {
            on_error(p, e);
            T::nan()
        }
    };
    let r = maximize_scalar(&mut objective, domain, opts)?;
    let divergent = match r.boundary_hit {
        BoundaryHit::None => false,
        hit => {
            let bounds = domain.search_bounds(opts.clip, opts.p_max)?;
            let probe = match hit {
                BoundaryHit::Lower if !domain.lo_closed => {
                    Some(domain.lo + (bounds.lo - domain.lo) / T::lit(1000.0))
                }
                BoundaryHit::Upper if bounds.capped => Some(bounds.hi * T::lit(10.0)),
                BoundaryHit::Upper => Some(domain.hi - (domain.hi - bounds.hi) / T::lit(1000.0)),
                _ => None,
            };
            probe.is_some_and(|q| {
                let v = objective(q);
                // a NaN probe (past the representable range) is not evidence
                v.is_finite() && v - r.opt_value > T::lit(DIVERGENCE_LN_GROWTH)
            })
        }
    };
    Ok(GlsNorm {
        value: if divergent {
            T::infinity()
        } else {
            r.opt_value.exp()
        },
        ln_value: r.opt_value,
        argmax_p: r.argopt,
        boundary_hit: r.boundary_hit,
        divergent,
        converged: r.converged,
    })
}

/// `∫` record for a single exponent where the Stein quadrature failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerPDivergence {
    pub p: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TailNorm<T: Scalar> {
    pub norm: GlsNorm<T>,
    /// Exponents at which `p ∫ t^{p-1} T dt` could not be evaluated; the
    /// supremum was taken over the remaining grid.
    pub divergences: Vec<PerPDivergence>,
}

/// GLS norm computed from a tail: `sup_p [p ∫ t^{p-1} T(t) dt]^{1/p} / ψ(p)`.
pub fn norm_from_tail<T: Scalar>(
    tail: &TailCurve<T>,
    psi: &GeneratingFunction<T>,
    opts: &MaximizeOptions<T>,
    rel_tol: T,
) -> Result<TailNorm<T>> {
    let profile = LpProfile::from_tail(tail.clone(), psi.domain, rel_tol);
    let failures = RefCell::new(Vec::new());
    let norm = gls_norm_on(&profile, psi, &psi.domain, opts, |p, e| {
        failures.borrow_mut().push(PerPDivergence {
            p: p.as_f64(),
            reason: e.to_string(),
        })
    })?;
    Ok(TailNorm {
        norm,
        divergences: failures.into_inner(),
    })
}

/// `p ∫₀^∞ t^{p-1} T(t) dt`, integrated in `v = ln t` and split at the tail's
/// breakpoints; the outer pieces use `t = b₀ e^{-w}` and `t = b_k e^{w}`.
pub fn stein_norm_pow<T: Scalar>(tail: &TailCurve<T>, p: T, rel_tol: T) -> Result<QuadratureResult<T>> {
    let (shift, q) = stein_scaled(tail, p, rel_tol)?;
    let scale = shift.exp();
    Ok(QuadratureResult {
        value: q.value * scale,
        abs_error_estimate: q.abs_error_estimate * scale,
        evaluations: q.evaluations,
    })
}

/// `ln(p ∫₀^∞ t^{p-1} T(t) dt)`, representable even when the integral
/// itself under- or overflows (large `p`).
pub fn ln_stein_norm_pow<T: Scalar>(tail: &TailCurve<T>, p: T, rel_tol: T) -> Result<T> {
    let (shift, q) = stein_scaled(tail, p, rel_tol)?;
    Ok(shift + q.value.ln())
}

fn sorted_breakpoints<T: Scalar>(tail: &TailCurve<T>) -> Vec<T> {
    let mut bps: Vec<T> = tail
        .breakpoints
        .iter()
        .copied()
        .filter(|b| *b > T::zero() && b.is_finite())
        .collect();
    bps.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    bps.dedup();
    bps
}

/// Evaluation budget per Stein integral. Very close to an integrability end
/// the level-set roots are large and their rounding noise caps the reachable
/// accuracy; such exponents should fail fast into the per-p record rather
/// than exhaust the general quadrature budget.
const STEIN_MAX_EVALUATIONS: usize = 60_000;

/// Integral divided by `e^{shift}`, with the shift chosen from samples of the
/// log-integrand so the scaled values stay near 1.
fn stein_scaled<T: Scalar>(tail: &TailCurve<T>, p: T, rel_tol: T) -> Result<(T, QuadratureResult<T>)> {
    if !(p > T::zero()) {
        return Err(Error::domain("Stein integral needs p > 0", p.as_f64()));
    }
    let mut bps = sorted_breakpoints(tail);
    if bps.is_empty() {
        if tail.t_max_support == T::zero() {
            let zero = QuadratureResult {
                value: T::zero(),
                abs_error_estimate: T::zero(),
                evaluations: 1,
            };
            return Ok((T::zero(), zero));
        }
        bps.push(T::one());
    }
    let ln_p = p.ln();
    let log_integrand = |v: T| -> Result<T> { Ok(ln_p + p * v + tail.ln_eval(v)?) };

    let mut shift = T::neg_infinity();
    let offsets = [0.0, 1e-6, 1e-3, 0.1, 1.0, 3.0, 10.0, 30.0];
    for b in &bps {
        for off in offsets {
            for v in [b.ln() - T::lit(off), b.ln() + T::lit(off)] {
                let x = log_integrand(v)?;
                if x.is_finite() && x > shift {
                    shift = x;
                }
            }
        }
    }
    if !shift.is_finite() {
        shift = T::zero();
    }

    // the outer pieces must decay: compare the log-integrand far out
    let (first, last) = (bps[0].ln(), bps[bps.len() - 1].ln());
    let (near, far) = (T::lit(1e3), T::lit(1e12));
    let decays = |a: T, b: T| -> Result<bool> {
        let (xa, xb) = (log_integrand(a)?, log_integrand(b)?);
        Ok(xb == T::neg_infinity() || xb < xa - T::one())
    };
    let upper_open = tail.t_max_support > bps[bps.len() - 1];
    if !decays(first - near, first - far)? || (upper_open && !decays(last + near, last + far)?) {
        return Err(Error::Domain {
            what: "Stein integral diverges (tail not integrable against t^{p-1})".into(),
            value: p.as_f64(),
        });
    }

    let opts = QuadOptions {
        max_evaluations: STEIN_MAX_EVALUATIONS,
        ..QuadOptions::with_rel_tol(rel_tol)
    };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // p e^{pv} T(e^v) e^{-shift} dv
    let weighted = |v: T| -> T {
        match log_integrand(v) {
            Ok(x) if x > T::neg_infinity() => (x - shift).exp(),
            Ok(_) => T::zero(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                T::nan()
            }
        }
    };
    let mut acc = QuadratureResult {
        value: T::zero(),
        abs_error_estimate: T::zero(),
        evaluations: 0,
    };
    let mut add = |r: Result<QuadratureResult<T>>| -> Result<()> {
        let r = r.map_err(|e| failure.borrow().clone().unwrap_or(e))?;
        acc.value = acc.value + r.value;
        acc.abs_error_estimate = acc.abs_error_estimate + r.abs_error_estimate;
        acc.evaluations += r.evaluations;
        Ok(())
    };

    // the power-type map covers slow decay (p near an integrability end)
    let v0 = bps[0].ln();
    add(integrate_semi_infinite(
        |w: T| weighted(v0 - w),
        T::zero(),
        Transform::PowerDecay,
        opts,
    ))?;
    for pair in bps.windows(2) {
        add(integrate(weighted, pair[0].ln(), pair[1].ln(), opts))?;
    }
    if upper_open {
        let vk = last;
        add(integrate_semi_infinite(
            |w: T| weighted(vk + w),
            T::zero(),
            Transform::PowerDecay,
            opts,
        ))?;
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !acc.value.is_finite() {
        return Err(Error::Convergence {
            partial: acc.value.as_f64(),
            abs_error: acc.abs_error_estimate.as_f64(),
            evaluations: acc.evaluations,
        });
    }
    Ok((shift, acc))
}
