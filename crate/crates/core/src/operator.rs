//! Operators with controlled L^p growth `‖U‖_{L^p→L^p} <= ζ(p)`: the
//! Riesz-type family `C (p - a₁)^{-α} (b₁ - p)^{-β}` and the classical Riesz
//! transform bound `C_d max{p, p/(p-1)}`, the transfer `φ = ζ ψ`, and the
//! resulting tail bound `T[U f](t) <= exp{-ν_f*(ln t)}` with `φ_f = ζ ‖f‖_p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fenchel::{tail_envelope, BoundReport};
use crate::gls::{GeneratingFunction, LpProfile};
use crate::model::Model;
use crate::numerics::{maximize_scalar, BoundaryHit, Interval, MaximizeOptions, OptimResult};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum OperatorProfile<T: Scalar> {
    RieszType { c: T, alpha: T, beta: T, a1: T, b1: T },
    ClassicalRiesz { cd: T },
}

impl<T: Scalar> OperatorProfile<T> {
    pub fn riesz_type(c: T, alpha: T, beta: T, a1: T, b1: T) -> Result<Self> {
        if !(c > T::zero() && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
        }
        if !(alpha >= T::zero() && beta >= T::zero() && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha, beta must be >= 0, got {alpha}, {beta}"
            )));
        }
        if !(a1 >= T::one() && a1 < b1 && a1.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= a1 < b1 <= inf, got ({a1}, {b1})"
            )));
        }
        if !b1.is_finite() && beta > T::zero() {
            return Err(Error::Domain {
                what: "b1 = inf with beta > 0 has no finite growth law".into(),
                value: beta.as_f64(),
            });
        }
        Ok(Self::RieszType {
            c,
            alpha,
            beta,
            a1,
            b1,
        })
    }

    pub fn classical_riesz(cd: T) -> Result<Self> {
        if !(cd > T::zero() && cd.is_finite()) {
            return Err(Error::InvalidParameter(format!("C_d must be positive, got {cd}")));
        }
        Ok(Self::ClassicalRiesz { cd })
    }

    /// `ζ ≡ 1` on `(1, inf)`: the identity operator.
    pub fn identity() -> Self {
        Self::RieszType {
            c: T::one(),
            alpha: T::zero(),
            beta: T::zero(),
            a1: T::one(),
            b1: T::infinity(),
        }
    }

    pub fn validity(&self) -> Interval<T> {
        let (lo, hi) = match *self {
            Self::RieszType { a1, b1, .. } => (a1, b1),
            Self::ClassicalRiesz { .. } => (T::one(), T::infinity()),
        };
        Interval {
            lo,
            hi,
            lo_closed: false,
        }
    }

    /// `ζ` as a generating function on its validity interval.
    pub fn as_generating_function(&self) -> Result<GeneratingFunction<T>> {
        match *self {
            Self::RieszType {
                c,
                alpha,
                beta,
                a1,
                b1,
            } => GeneratingFunction::parametric_scaled(c, a1, b1, alpha, beta),
            Self::ClassicalRiesz { cd } => GeneratingFunction::classical_riesz(cd),
        }
    }

    pub fn ln_zeta(&self, p: T) -> Result<T> {
        self.validity().check(p, "operator validity")?;
        Ok(match *self {
            Self::RieszType {
                c,
                alpha,
                beta,
                a1,
                b1,
            } => {
                let mut v = c.ln();
                if alpha != T::zero() {
                    v = v - alpha * (p - a1).ln();
                }
                if beta != T::zero() {
                    v = v - beta * (b1 - p).ln();
                }
                v
            }
            Self::ClassicalRiesz { cd } => cd.ln() + p.max(p / (p - T::one())).ln(),
        })
    }

    pub fn zeta(&self, p: T) -> Result<T> {
        self.validity().check(p, "operator validity")?;
        Ok(match *self {
            Self::RieszType {
                c,
                alpha,
                beta,
                a1,
                b1,
            } => {
                let mut v = c;
                if alpha != T::zero() {
                    v = v * (p - a1).powf(-alpha);
                }
                if beta != T::zero() {
                    v = v * (b1 - p).powf(-beta);
                }
                v
            }
            Self::ClassicalRiesz { cd } => cd * p.max(p / (p - T::one())),
        })
    }

    pub fn label(&self) -> String {
        match self {
            Self::RieszType {
                c,
                alpha,
                beta,
                a1,
                b1,
            } => format!("riesz_type[C={c},alpha={alpha},beta={beta},a1={a1},b1={b1}]"),
            Self::ClassicalRiesz { cd } => format!("classical_riesz[Cd={cd}]"),
        }
    }
}

/// `x^x` with `0^0 = 1`.
fn self_power<T: Scalar>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        x.powf(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ZetaMinimum<T: Scalar> {
    /// `p* = (α b₁ + β a₁)/(α + β)`.
    pub p_star: T,
    /// `C (b₁ - a₁)^{-(α+β)} (α+β)^{α+β} / (α^α β^β)`.
    pub min_value: T,
    /// Numeric minimization on the clipped validity interval.
    pub numeric: OptimResult<T>,
    /// Numeric minimum value `ζ(numeric.argopt)`.
    pub numeric_value: T,
    /// `α = β = 0`: ζ is constant, any interior p is optimal.
    pub degenerate: bool,
    /// Where the infimum sits in closed form (`p*` at an end when α or β is 0).
    pub boundary: BoundaryHit,
}

/// Closed-form minimizer of a Riesz-type ζ, cross-checked numerically.
pub fn zeta_minimize<T: Scalar>(
    profile: &OperatorProfile<T>,
    opts: &MaximizeOptions<T>,
) -> Result<ZetaMinimum<T>> {
    let OperatorProfile::RieszType {
        c,
        alpha,
        beta,
        a1,
        b1,
    } = *profile
    else {
        return Err(Error::InvalidParameter(
            "closed-form minimization applies to Riesz-type profiles".into(),
        ));
    };
    if !b1.is_finite() {
        return Err(Error::Domain {
            what: "zeta minimization needs a finite b1".into(),
            value: f64::INFINITY,
        });
    }
    let sum = alpha + beta;
    let degenerate = sum == T::zero();
    let (p_star, min_value, boundary) = if degenerate {
        (T::lit(0.5) * (a1 + b1), c, BoundaryHit::None)
    } else {
        let p_star = (alpha * b1 + beta * a1) / sum;
        let min_value = c / (b1 - a1).powf(sum) * self_power(sum) / (self_power(alpha) * self_power(beta));
        let boundary = if beta == T::zero() {
            BoundaryHit::Upper
        } else if alpha == T::zero() {
            BoundaryHit::Lower
        } else {
            BoundaryHit::None
        };
        (p_star, min_value, boundary)
    };
    let numeric = maximize_scalar(
        |p: T| profile.ln_zeta(p).map_or(T::nan(), |v| -v),
        &profile.validity(),
        opts,
    )?;
    let numeric_value = (-numeric.opt_value).exp();
    Ok(ZetaMinimum {
        p_star,
        min_value,
        numeric,
        numeric_value,
        degenerate,
        boundary,
    })
}

/// `(ζ(p)(p - 1), ζ(p)/p)` for the classical Riesz profile: both stay near
/// `C_d` at the respective ends `p ↓ 1` and `p → inf`.
pub fn riesz_endpoint_profile<T: Scalar>(cd: T, p: T) -> Result<(T, T)> {
    let z = OperatorProfile::classical_riesz(cd)?.zeta(p)?;
    Ok((z * (p - T::one()), z / p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TransferResult<T: Scalar> {
    pub operator: OperatorProfile<T>,
    /// `φ = ζ ψ` on `I`.
    pub phi: GeneratingFunction<T>,
    pub interval: Interval<T>,
    /// Bound on the output GLS norm relative to the input one.
    pub certificate: T,
}

impl<T: Scalar> TransferResult<T> {
    /// `ν_φ(p) = p ln φ(p)`.
    pub fn nu(&self, p: T) -> Result<T> {
        Ok(p * self.phi.ln_eval(p)?)
    }
}

/// `‖U h‖_{G φ} <= ‖h‖_{G ψ}` with `φ = ζ ψ` on `I = validity ∩ supp ψ`.
pub fn transfer<T: Scalar>(
    profile: &OperatorProfile<T>,
    psi: &GeneratingFunction<T>,
) -> Result<TransferResult<T>> {
    let zeta = profile.as_generating_function()?;
    let interval = zeta.domain.intersect(&psi.domain).ok_or_else(|| {
        Error::EmptyInterval(format!("I = {} ∩ {} is empty", profile.validity(), psi.domain))
    })?;
    let phi = GeneratingFunction::product(zeta, psi.clone())?;
    Ok(TransferResult {
        operator: *profile,
        phi,
        interval,
        certificate: T::one(),
    })
}

/// Input function of the theorem: a model (closed-form norms) or any profile.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundInput<T: Scalar> {
    Model(Model<T>),
    Profile(LpProfile<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TheoremBound<T: Scalar> {
    pub transfer: TransferResult<T>,
    pub report: BoundReport<T>,
}

/// `T[U f](t) <= R[φ_f](1; t)` with `φ_f(p) = ζ(p) ‖f‖_p` on
/// `I = supp w ∩ (a₁, b₁)`.
///
/// `c_high` (if given) worst-cases a comparison `‖f‖_p <= c_high ‖model‖_p`
/// by scaling the profile.
pub fn theorem_tail_bound<T: Scalar>(
    input: &BoundInput<T>,
    profile: &OperatorProfile<T>,
    t_grid: &[T],
    c_high: Option<T>,
    opts: &MaximizeOptions<T>,
) -> Result<TheoremBound<T>> {
    let mut warnings = Vec::new();
    let mut w = match input {
        BoundInput::Model(m) => {
            if let OperatorProfile::ClassicalRiesz { .. } = profile {
                let ad = match m {
                    Model::Outer(o) => Some(o.critical_p()),
                    Model::Sum(s) => Some(s.outer.critical_p()),
                    Model::Inner(_) => None,
                };
                if let Some(ad) = ad.filter(|ad| *ad <= T::one()) {
                    warnings.push(format!(
                        "joint-validity hypothesis a·d > 1 fails (a·d = {ad}); bound computed on I only"
                    ));
                }
            }
            LpProfile::from_model(*m)?
        }
        BoundInput::Profile(p) => p.clone(),
    };
    if let Some(c) = c_high {
        w = w.scaled(c)?;
    }
    let natural = GeneratingFunction::natural(w);
    let transfer = transfer(profile, &natural)?;
    let mut report = tail_envelope(&transfer.phi, T::one(), t_grid, opts)?;
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    Ok(TheoremBound { transfer, report })
}
