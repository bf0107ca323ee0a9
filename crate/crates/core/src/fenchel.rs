//! Young–Fenchel transform of `ν_ψ(p) = p ln ψ(p)` and the tail envelope
//! `R[ψ](u; t) = exp{-ν_ψ*(ln(t/u))}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gls::{GeneratingFunction, LpProfile};
use crate::model::TailCurve;
use crate::numerics::{maximize_scalar, BoundaryHit, MaximizeOptions};
use crate::scalar::Scalar;

/// Below this `ln R` the envelope is reported as `R = 0` with an underflow flag.
pub const LN_UNDERFLOW: f64 = -745.0;

/// `ν_ψ(p) = p ln ψ(p)`.
pub fn nu<T: Scalar>(psi: &GeneratingFunction<T>, p: T) -> Result<T> {
    Ok(p * psi.ln_eval(p)?)
}

/// `ν_ψ` as a standalone function object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NuFunction<T: Scalar> {
    pub source: GeneratingFunction<T>,
}

impl<T: Scalar> NuFunction<T> {
    pub fn new(source: GeneratingFunction<T>) -> Self {
        Self { source }
    }

    pub fn eval(&self, p: T) -> Result<T> {
        nu(&self.source, p)
    }

    pub fn conjugate(&self, y: T, opts: &MaximizeOptions<T>) -> Result<FenchelResult<T>> {
        fenchel_transform(&self.source, y, opts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FenchelResult<T: Scalar> {
    pub y: T,
    /// `ν*(y)`.
    pub value: T,
    pub argmax_p: T,
    pub boundary_hit: BoundaryHit,
    pub converged: bool,
}

/// `ν*(y) = sup_p (p y - ν(p))` over the (clipped, capped) domain of ψ.
pub fn fenchel_transform<T: Scalar>(
    psi: &GeneratingFunction<T>,
    y: T,
    opts: &MaximizeOptions<T>,
) -> Result<FenchelResult<T>> {
    if !y.is_finite() {
        return Err(Error::domain("Fenchel argument must be finite", y.as_f64()));
    }
    let r = maximize_scalar(
        |p: T| match psi.ln_eval(p) {
            Ok(l) => p * (y - l),
            Err(_) => T::nan(),
        },
        &psi.domain,
        opts,
    )?;
    Ok(FenchelResult {
        y,
        value: r.opt_value,
        argmax_p: r.argopt,
        boundary_hit: r.boundary_hit,
        converged: r.converged,
    })
}

/// `‖f‖_p^p / t^p`, computed as `exp(p (ln ‖f‖_p - ln t))`.
pub fn chebyshev_pointwise<T: Scalar>(profile: &LpProfile<T>, t: T, p: T) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::domain("t must be positive", t.as_f64()));
    }
    Ok((p * (profile.ln_eval(p)? - t.ln())).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundRow<T: Scalar> {
    pub t: T,
    #[serde(rename = "lnR")]
    pub ln_r: T,
    #[serde(rename = "R")]
    pub r: T,
    pub argmax_p: T,
    pub boundary: BoundaryHit,
    /// `ln R` fell below [`LN_UNDERFLOW`]; `R` is reported as 0.
    pub underflow: bool,
    /// `R > 1`: no information beyond the trivial bound.
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact_tail: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dominance_ok: Option<bool>,
}

/// Envelope values on a grid of levels `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundReport<T: Scalar> {
    pub v: u32,
    /// Norm `u` entering `ln(t/u)`.
    pub u: T,
    pub rows: Vec<BoundRow<T>>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> BoundReport<T> {
    pub fn has_dominance(&self) -> bool {
        self.rows.iter().any(|r| r.dominance_ok.is_some())
    }

    /// True when dominance was audited and held at every row.
    pub fn dominance_holds(&self) -> bool {
        self.has_dominance() && self.rows.iter().all(|r| r.dominance_ok == Some(true))
    }

    /// Compare against an exact tail: row passes when
    /// `R - T >= -slack · max(1, T)`.
    pub fn attach_dominance(&mut self, tail: &TailCurve<T>, slack: T) -> Result<()> {
        let mut failures = 0usize;
        for row in &mut self.rows {
            let exact = tail.eval(row.t)?;
            let ok = row.r - exact >= -slack * exact.max(T::one());
            failures += usize::from(!ok);
            row.exact_tail = Some(exact);
            row.dominance_ok = Some(ok);
        }
        if failures > 0 {
            self.warnings.push(format!(
                "envelope below the reference tail at {failures} grid points"
            ));
        }
        Ok(())
    }
}

/// `R[ψ](u; t)` on each grid level.
pub fn tail_envelope<T: Scalar>(
    psi: &GeneratingFunction<T>,
    u: T,
    t_grid: &[T],
    opts: &MaximizeOptions<T>,
) -> Result<BoundReport<T>> {
    if !(u > T::zero() && u.is_finite()) {
        return Err(Error::domain("envelope needs 0 < u < inf", u.as_f64()));
    }
    let ln_u = u.ln();
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t > T::zero() && t.is_finite()) {
            return Err(Error::domain("t-grid values must be positive", t.as_f64()));
        }
        let f = fenchel_transform(psi, t.ln() - ln_u, opts)?;
        let ln_r = -f.value;
        let underflow = ln_r < T::lit(LN_UNDERFLOW);
        let r = if underflow { T::zero() } else { ln_r.exp() };
        rows.push(BoundRow {
            t,
            ln_r,
            r,
            argmax_p: f.argmax_p,
            boundary: f.boundary_hit,
            underflow,
            vacuous: r > T::one(),
            exact_tail: None,
            dominance_ok: None,
        });
    }
    let warnings = envelope_warnings(&rows, psi);
    Ok(BoundReport {
        v: 1,
        u,
        rows,
        warnings,
    })
}

fn envelope_warnings<T: Scalar>(rows: &[BoundRow<T>], psi: &GeneratingFunction<T>) -> Vec<String> {
    let mut w = Vec::new();
    let count = |pred: &dyn Fn(&BoundRow<T>) -> bool| rows.iter().filter(|r| pred(r)).count();
    let vacuous = count(&|r| r.vacuous);
    if vacuous > 0 {
        w.push(format!("envelope exceeds 1 (vacuous) at {vacuous} grid points"));
    }
    let lower = count(&|r| r.boundary == BoundaryHit::Lower);
    if lower > 0 {
        w.push(format!(
            "optimal p at the lower end of {} at {lower} grid points",
            psi.domain
        ));
    }
    let upper = count(&|r| r.boundary == BoundaryHit::Upper);
    if upper > 0 {
        let what = if psi.domain.is_bounded() {
            "upper end"
        } else {
            "p_max cap"
        };
        w.push(format!("optimal p at the {what} at {upper} grid points"));
    }
    let under = count(&|r| r.underflow);
    if under > 0 {
        w.push(format!(
            "envelope underflows (R reported as 0) at {under} grid points"
        ));
    }
    w
}
