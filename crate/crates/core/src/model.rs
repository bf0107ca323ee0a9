//! Explicit radial model functions on `R^d`:
//!
//! * outer: `f(x) = 1{|x| > 1} |x|^{-1/a} (ln |x|)^γ`
//! * inner: `g(x) = 1{|x| < 1} |x|^{-1/b} |ln |x||^ν`
//! * sum:   `h = f + g` (disjoint supports)
//!
//! Norms are assembled in log space. Level sets are found in the log-radius
//! variable `s = ±ln r`, where both profiles become `±s/a + γ ln s`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gamma_ln, invert_monotone, Direction, Interval};
use crate::scalar::{log_add_exp, Scalar};

/// `ln S_{d-1}` with `S_{d-1} = 2 π^{d/2} / Γ(d/2)`.
pub fn ln_sphere_area<T: Scalar>(d: u32) -> Result<T> {
    if d == 0 {
        return Err(Error::domain("dimension must be >= 1", 0.0));
    }
    let half_d = T::from_u32(d).expect("u32 fits") * T::lit(0.5);
    Ok(T::lit(2.0).ln() + half_d * T::PI().ln() - gamma_ln(half_d)?)
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area<T: Scalar>(d: u32) -> Result<T> {
    ln_sphere_area::<T>(d).map(T::exp)
}

/// `ln(S_{d-1} / d)`, the log-volume of the unit ball.
fn ln_ball_volume<T: Scalar>(d: u32) -> Result<T> {
    Ok(ln_sphere_area::<T>(d)? - dim::<T>(d).ln())
}

fn dim<T: Scalar>(d: u32) -> T {
    T::from_u32(d).expect("u32 fits")
}

/// How the level set of the non-monotone outer profile (`γ > 0`) is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSet {
    /// The full shell `1 < |x| <= r(t)` up to the decreasing-branch root.
    /// Exact for small `t`; over-counts near the sup-norm.
    #[default]
    Shell,
    /// Both branch roots: the shell `r₁(t) <= |x| <= r₂(t)`.
    Exact,
}

/// Which leading-order inversion of the level equation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticVariant {
    /// `r(t) ≈ t^{-a} [ln(1/t)]^{aγ}`.
    #[default]
    Classic,
    /// `r(t) ≈ t^{-a} [a ln(1/t)]^{aγ}`, which also carries the `a^{aγ}`
    /// factor that makes the substitution consistent when `a ≠ 1`.
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OuterModel<T: Scalar> {
    pub a: T,
    pub gamma: T,
    pub d: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct InnerModel<T: Scalar> {
    pub b: T,
    pub nu: T,
    pub d: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SumModel<T: Scalar> {
    pub outer: OuterModel<T>,
    pub inner: InnerModel<T>,
}

impl<T: Scalar> OuterModel<T> {
    pub fn new(a: T, gamma: T, d: u32) -> Result<Self> {
        if !(a > T::zero() && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("outer a must be > 0, got {a}")));
        }
        if !(gamma >= T::zero() && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "outer gamma must be >= 0, got {gamma}"
            )));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(Self { a, gamma, d })
    }

    /// `a · d`, the lower end of the integrability range.
    pub fn critical_p(&self) -> T {
        self.a * dim::<T>(self.d)
    }

    /// `ln r^{-1/a} (ln r)^γ` as a function of `s = ln r > 0`.
    fn ln_profile(&self, s: T) -> T {
        let v = -s / self.a;
        if self.gamma == T::zero() {
            v
        } else {
            v + self.gamma * s.ln()
        }
    }

    /// `ln s` at the peak of the profile, `s* = aγ`.
    fn peak_s(&self) -> T {
        self.a * self.gamma
    }
}

impl<T: Scalar> InnerModel<T> {
    pub fn new(b: T, nu: T, d: u32) -> Result<Self> {
        if !(b > T::zero() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("inner b must be > 0, got {b}")));
        }
        if !(nu > T::zero() && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("inner nu must be > 0, got {nu}")));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(Self { b, nu, d })
    }

    /// `b · d`, the upper end of the integrability range.
    pub fn critical_p(&self) -> T {
        self.b * dim::<T>(self.d)
    }

    /// `ln r^{-1/b} |ln r|^ν` as a function of `s = -ln r > 0`; increasing.
    fn ln_profile(&self, s: T) -> T {
        s / self.b + self.nu * s.ln()
    }
}

impl<T: Scalar> SumModel<T> {
    pub fn new(outer: OuterModel<T>, inner: InnerModel<T>) -> Result<Self> {
        if outer.d != inner.d {
            return Err(Error::InvalidParameter(format!(
                "sum components live in different dimensions ({} vs {})",
                outer.d, inner.d
            )));
        }
        if !(outer.critical_p() < inner.critical_p()) {
            return Err(Error::EmptyInterval(format!(
                "(a·d, b·d) = ({}, {})",
                outer.critical_p(),
                inner.critical_p()
            )));
        }
        Ok(Self { outer, inner })
    }
}

// ---------------------------------------------------------------------------
// pointwise values

pub fn eval_outer<T: Scalar>(m: &OuterModel<T>, x_norm: T) -> T {
    if x_norm <= T::one() || x_norm == T::infinity() {
        return T::zero();
    }
    m.ln_profile(x_norm.ln()).exp()
}

pub fn eval_inner<T: Scalar>(m: &InnerModel<T>, x_norm: T) -> T {
    if x_norm >= T::one() || x_norm < T::zero() {
        return T::zero();
    }
    if x_norm == T::zero() {
        return T::infinity();
    }
    m.ln_profile(-x_norm.ln()).exp()
}

// ---------------------------------------------------------------------------
// L^p norms

/// `ln ‖f‖_p^p = ln S_{d-1} + ln Γ(γp + 1) - (γp + 1) ln(p/a - d)` for `p > a·d`.
pub fn ln_lp_norm_pow_outer<T: Scalar>(m: &OuterModel<T>, p: T) -> Result<T> {
    let crit = m.critical_p();
    if !(p > crit) || !p.is_finite() {
        return Err(Error::OutOfRange {
            p: p.as_f64(),
            range: format!("outer integrability (a·d, inf) = ({crit}, inf)"),
        });
    }
    let lambda = p / m.a - dim::<T>(m.d);
    let alpha = m.gamma * p;
    Ok(ln_sphere_area::<T>(m.d)? + gamma_ln(alpha + T::one())? - (alpha + T::one()) * lambda.ln())
}

pub fn lp_norm_outer<T: Scalar>(m: &OuterModel<T>, p: T) -> Result<T> {
    Ok((ln_lp_norm_pow_outer(m, p)? / p).exp())
}

/// `ln ‖g‖_p^p = ln S_{d-1} + ln Γ(νp + 1) - (νp + 1) ln(d - p/b)` for `1 <= p < b·d`.
pub fn ln_lp_norm_pow_inner<T: Scalar>(m: &InnerModel<T>, p: T) -> Result<T> {
    if p < T::one() || p.is_nan() {
        return Err(Error::domain("inner norm requires p >= 1", p.as_f64()));
    }
    let crit = m.critical_p();
    if !(p < crit) {
        return Err(Error::OutOfRange {
            p: p.as_f64(),
            range: format!("inner integrability [1, b·d) = [1, {crit})"),
        });
    }
    let lambda = dim::<T>(m.d) - p / m.b;
    let alpha = m.nu * p;
    Ok(ln_sphere_area::<T>(m.d)? + gamma_ln(alpha + T::one())? - (alpha + T::one()) * lambda.ln())
}

pub fn lp_norm_inner<T: Scalar>(m: &InnerModel<T>, p: T) -> Result<T> {
    Ok((ln_lp_norm_pow_inner(m, p)? / p).exp())
}

/// `ln ‖h‖_p^p`: the p-th powers add because the supports are disjoint.
pub fn ln_lp_norm_pow_sum<T: Scalar>(m: &SumModel<T>, p: T) -> Result<T> {
    let (lo, hi) = (m.outer.critical_p(), m.inner.critical_p());
    if !(p > lo && p < hi) {
        return Err(Error::OutOfRange {
            p: p.as_f64(),
            range: format!("sum integrability (a·d, b·d) = ({lo}, {hi})"),
        });
    }
    Ok(log_add_exp(
        ln_lp_norm_pow_outer(&m.outer, p)?,
        ln_lp_norm_pow_inner(&m.inner, p)?,
    ))
}

pub fn lp_norm_sum<T: Scalar>(m: &SumModel<T>, p: T) -> Result<T> {
    Ok((ln_lp_norm_pow_sum(m, p)? / p).exp())
}

/// `‖f‖_∞ = e^{-γ} (aγ)^γ`, or `1` when `γ = 0`.
pub fn sup_norm_outer<T: Scalar>(m: &OuterModel<T>) -> T {
    if m.gamma == T::zero() {
        T::one()
    } else {
        m.ln_profile(m.peak_s()).exp()
    }
}

// ---------------------------------------------------------------------------
// tails

fn root_tol<T: Scalar>() -> T {
    T::epsilon() * T::lit(4.0)
}

/// Decreasing-branch root `s₂ >= aγ` of `-s/a + γ ln s = ln t`.
fn outer_far_root<T: Scalar>(m: &OuterModel<T>, ln_t: T) -> Result<T> {
    if m.gamma == T::zero() {
        return Ok(-m.a * ln_t);
    }
    let lo = m.peak_s();
    let mut hi = (lo + lo).max(T::one());
    while m.ln_profile(hi) > ln_t {
        hi = hi + hi;
        if !hi.is_finite() {
            return Err(Error::Evaluation(format!("no outer root for ln t = {ln_t}")));
        }
    }
    invert_monotone(
        |s| m.ln_profile(s),
        ln_t,
        (lo, hi),
        Direction::Decreasing,
        root_tol(),
    )
}

/// Increasing-branch root `s₁ <= aγ`; `None` when it underflows to `r = 1`.
fn outer_near_root<T: Scalar>(m: &OuterModel<T>, ln_t: T) -> Result<Option<T>> {
    if m.gamma == T::zero() {
        return Ok(Some(T::zero()));
    }
    let hi = m.peak_s();
    let mut lo = hi * T::lit(0.5);
    while m.ln_profile(lo) > ln_t {
        lo = lo * T::lit(0.5);
        if lo < T::min_positive_value() {
            return Ok(None);
        }
    }
    invert_monotone(
        |s| m.ln_profile(s),
        ln_t,
        (lo, hi),
        Direction::Increasing,
        root_tol(),
    )
    .map(Some)
}

/// `ln(e^x - 1)` for `x >= 0`, without overflow for large `x`.
fn ln_expm1<T: Scalar>(x: T) -> T {
    if x > T::lit(30.0) {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

fn check_t<T: Scalar>(t: T) -> Result<T> {
    if t > T::zero() {
        Ok(t.ln())
    } else {
        Err(Error::domain("tail requires t > 0", t.as_f64()))
    }
}

/// `ln μ{ f_{a,γ} >= t }` as a function of `ln t`; `-inf` where the tail
/// vanishes. Working from `ln t` keeps the tail representable when `t` or
/// `T(t)` over- or underflows.
pub fn ln_tail_outer<T: Scalar>(m: &OuterModel<T>, ln_t: T, level_set: LevelSet) -> Result<T> {
    if ln_t.is_nan() {
        return Err(Error::domain("tail requires t > 0", f64::NAN));
    }
    let ln_sup = if m.gamma == T::zero() {
        T::zero()
    } else {
        m.ln_profile(m.peak_s())
    };
    if ln_t > ln_sup {
        return Ok(T::neg_infinity());
    }
    if ln_t == T::neg_infinity() {
        return Ok(T::infinity());
    }
    let d = dim::<T>(m.d);
    let ln_ball = ln_ball_volume::<T>(m.d)?;
    let s2 = outer_far_root(m, ln_t)?;
    let s1 = match level_set {
        LevelSet::Shell => T::zero(),
        LevelSet::Exact => outer_near_root(m, ln_t)?.unwrap_or(T::zero()),
    };
    // (S/d)(r₂^d - r₁^d) = (S/d) r₁^d expm1(d (s₂ - s₁))
    Ok(ln_ball + d * s1 + ln_expm1(d * (s2 - s1).max(T::zero())))
}

/// Measure of `{ f_{a,γ} >= t }`.
pub fn tail_outer<T: Scalar>(m: &OuterModel<T>, t: T, level_set: LevelSet) -> Result<T> {
    ln_tail_outer(m, check_t(t)?, level_set).map(T::exp)
}

/// `ln μ{ g_{b,ν} >= t }` as a function of `ln t`.
pub fn ln_tail_inner<T: Scalar>(m: &InnerModel<T>, ln_t: T) -> Result<T> {
    if ln_t.is_nan() {
        return Err(Error::domain("tail requires t > 0", f64::NAN));
    }
    let ln_ball = ln_ball_volume::<T>(m.d)?;
    if ln_t == T::infinity() {
        return Ok(T::neg_infinity());
    }
    let mut lo = T::one();
    while m.ln_profile(lo) >= ln_t {
        lo = lo * T::lit(0.5);
        if lo < T::min_positive_value() {
            // r(t) rounds to 1: saturated at the unit-ball measure
            return Ok(ln_ball);
        }
    }
    let mut hi = T::one();
    while m.ln_profile(hi) <= ln_t {
        hi = hi + hi;
    }
    let s = invert_monotone(
        |s| m.ln_profile(s),
        ln_t,
        (lo, hi),
        Direction::Increasing,
        root_tol(),
    )?;
    Ok(ln_ball - dim::<T>(m.d) * s)
}

/// Measure of `{ g_{b,ν} >= t }`: the ball `|x| <= r(t)`, which fills the
/// whole unit ball as `t -> 0`.
pub fn tail_inner<T: Scalar>(m: &InnerModel<T>, t: T) -> Result<T> {
    ln_tail_inner(m, check_t(t)?).map(T::exp)
}

pub fn ln_tail_sum<T: Scalar>(m: &SumModel<T>, ln_t: T, level_set: LevelSet) -> Result<T> {
    Ok(log_add_exp(
        ln_tail_outer(&m.outer, ln_t, level_set)?,
        ln_tail_inner(&m.inner, ln_t)?,
    ))
}

pub fn tail_sum<T: Scalar>(m: &SumModel<T>, t: T, level_set: LevelSet) -> Result<T> {
    ln_tail_sum(m, check_t(t)?, level_set).map(T::exp)
}

/// `(S_{d-1}/d) t^{-ad} [c ln(1/t)]^{aγd}` with `c = 1` (classic) or `c = a`.
pub fn tail_asymptotic_outer<T: Scalar>(m: &OuterModel<T>, t: T, variant: AsymptoticVariant) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::domain("tail requires t > 0", t.as_f64()));
    }
    let d = dim::<T>(m.d);
    let mut ln_v = ln_ball_volume::<T>(m.d)? - m.a * d * t.ln();
    if m.gamma > T::zero() {
        if !(t < T::one()) {
            return Err(Error::domain(
                "outer asymptotic needs t < 1 when gamma > 0",
                t.as_f64(),
            ));
        }
        let c = match variant {
            AsymptoticVariant::Classic => T::one(),
            AsymptoticVariant::Corrected => m.a,
        };
        ln_v = ln_v + m.a * m.gamma * d * (c * (-t.ln())).ln();
    }
    Ok(ln_v.exp())
}

/// `(S_{d-1}/d) t^{-bd} [c ln t]^{bνd}` with `c = 1` (classic) or `c = b`.
pub fn tail_asymptotic_inner<T: Scalar>(m: &InnerModel<T>, t: T, variant: AsymptoticVariant) -> Result<T> {
    if !(t > T::one()) {
        return Err(Error::domain("inner asymptotic needs t > 1", t.as_f64()));
    }
    let d = dim::<T>(m.d);
    let c = match variant {
        AsymptoticVariant::Classic => T::one(),
        AsymptoticVariant::Corrected => m.b,
    };
    let ln_v = ln_ball_volume::<T>(m.d)? - m.b * d * t.ln() + m.b * m.nu * d * (c * t.ln()).ln();
    Ok(ln_v.exp())
}

// ---------------------------------------------------------------------------
// family dispatch

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", bound = "")]
pub enum Model<T: Scalar> {
    Outer(OuterModel<T>),
    Inner(InnerModel<T>),
    Sum(SumModel<T>),
}

impl<T: Scalar> Model<T> {
    pub fn dimension(&self) -> u32 {
        match self {
            Model::Outer(m) => m.d,
            Model::Inner(m) => m.d,
            Model::Sum(m) => m.outer.d,
        }
    }

    /// Exponents `p >= 1` at which the model is in `L^p`.
    pub fn integrability(&self) -> Result<Interval<T>> {
        let one = T::one();
        let lower = |crit: T| -> (T, bool) {
            if crit >= one {
                (crit, false)
            } else {
                (one, true)
            }
        };
        let (lo, lo_closed, hi) = match self {
            Model::Outer(m) => {
                let (lo, c) = lower(m.critical_p());
                (lo, c, T::infinity())
            }
            Model::Inner(m) => (one, true, m.critical_p()),
            Model::Sum(m) => {
                let (lo, c) = lower(m.outer.critical_p());
                (lo, c, m.inner.critical_p())
            }
        };
        if !(lo < hi) {
            return Err(Error::EmptyInterval(format!(
                "no p >= 1 with finite L^p norm (upper end {hi})"
            )));
        }
        Ok(Interval { lo, hi, lo_closed })
    }

    pub fn ln_lp_norm_pow(&self, p: T) -> Result<T> {
        match self {
            Model::Outer(m) => ln_lp_norm_pow_outer(m, p),
            Model::Inner(m) => ln_lp_norm_pow_inner(m, p),
            Model::Sum(m) => ln_lp_norm_pow_sum(m, p),
        }
    }

    pub fn ln_lp_norm(&self, p: T) -> Result<T> {
        Ok(self.ln_lp_norm_pow(p)? / p)
    }

    pub fn lp_norm(&self, p: T) -> Result<T> {
        self.ln_lp_norm(p).map(T::exp)
    }

    pub fn sup_norm(&self) -> T {
        match self {
            Model::Outer(m) => sup_norm_outer(m),
            _ => T::infinity(),
        }
    }

    pub fn eval(&self, x_norm: T) -> T {
        match self {
            Model::Outer(m) => eval_outer(m, x_norm),
            Model::Inner(m) => eval_inner(m, x_norm),
            Model::Sum(m) => eval_outer(&m.outer, x_norm) + eval_inner(&m.inner, x_norm),
        }
    }

    pub fn tail(&self, t: T, level_set: LevelSet) -> Result<T> {
        self.ln_tail(check_t(t)?, level_set).map(T::exp)
    }

    /// `ln T(t)` from `ln t`.
    pub fn ln_tail(&self, ln_t: T, level_set: LevelSet) -> Result<T> {
        match self {
            Model::Outer(m) => ln_tail_outer(m, ln_t, level_set),
            Model::Inner(m) => ln_tail_inner(m, ln_t),
            Model::Sum(m) => ln_tail_sum(m, ln_t, level_set),
        }
    }

    /// Leading-order tail in the model's nontrivial regime: small `t` for the
    /// outer part, large `t` for the inner part. For the sum, whichever
    /// component governs `t` (`t < 1` outer, `t > 1` inner).
    pub fn tail_asymptotic(&self, t: T, variant: AsymptoticVariant) -> Result<T> {
        match self {
            Model::Outer(m) => tail_asymptotic_outer(m, t, variant),
            Model::Inner(m) => tail_asymptotic_inner(m, t, variant),
            Model::Sum(m) => {
                if t < T::one() {
                    tail_asymptotic_outer(&m.outer, t, variant)
                } else {
                    tail_asymptotic_inner(&m.inner, t, variant)
                }
            }
        }
    }

    pub fn tail_curve(&self, level_set: LevelSet) -> TailCurve<T> {
        TailCurve::from_model(*self, level_set)
    }

    pub fn label(&self) -> String {
        match self {
            Model::Outer(m) => format!("f[a={},gamma={},d={}]", m.a, m.gamma, m.d),
            Model::Inner(m) => format!("g[b={},nu={},d={}]", m.b, m.nu, m.d),
            Model::Sum(m) => format!(
                "h[a={},gamma={},b={},nu={},d={}]",
                m.outer.a, m.outer.gamma, m.inner.b, m.inner.nu, m.outer.d
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// tail curves

/// Tabulated nonincreasing tail, linear between nodes, constant below the
/// first node and zero above the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TabulatedTail<T: Scalar> {
    t: Vec<T>,
    tail: Vec<T>,
}

impl<T: Scalar> TabulatedTail<T> {
    pub fn new(t: Vec<T>, tail: Vec<T>) -> Result<Self> {
        if t.len() != tail.len() || t.len() < 2 {
            return Err(Error::Table("tail table needs >= 2 rows of (t, T)".into()));
        }
        if t.windows(2).any(|w| !(w[0] < w[1])) || !(t[0] > T::zero()) {
            return Err(Error::Table(
                "t column must be positive and strictly increasing".into(),
            ));
        }
        if tail.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::Table("T column must be finite and nonnegative".into()));
        }
        if tail.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Table("T column must be nonincreasing".into()));
        }
        Ok(Self { t, tail })
    }

    pub fn eval(&self, t: T) -> T {
        let n = self.t.len();
        if t <= self.t[0] {
            return self.tail[0];
        }
        if t > self.t[n - 1] {
            return T::zero();
        }
        let i = self.t.partition_point(|x| *x < t).max(1);
        let (t0, t1) = (self.t[i - 1], self.t[i]);
        let w = (t - t0) / (t1 - t0);
        self.tail[i - 1] + w * (self.tail[i] - self.tail[i - 1])
    }

    pub fn nodes(&self) -> &[T] {
        &self.t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", bound = "")]
pub enum TailSource<T: Scalar> {
    Model { model: Model<T>, level_set: LevelSet },
    Tabulated(TabulatedTail<T>),
    Zero,
}

/// A nonincreasing tail function `t ↦ μ{|f| >= t}` with its support and the
/// points where it is not smooth (used to split integrals).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TailCurve<T: Scalar> {
    pub source: TailSource<T>,
    pub t_min_support: T,
    pub t_max_support: T,
    pub breakpoints: Vec<T>,
}

impl<T: Scalar> TailCurve<T> {
    pub fn from_model(model: Model<T>, level_set: LevelSet) -> Self {
        let sup = model.sup_norm();
        let breakpoints = match &model {
            Model::Outer(m) => vec![sup_norm_outer(m)],
            Model::Inner(_) => vec![T::one()],
            Model::Sum(m) => vec![sup_norm_outer(&m.outer)],
        };
        Self {
            source: TailSource::Model { model, level_set },
            t_min_support: T::zero(),
            t_max_support: sup,
            breakpoints,
        }
    }

    pub fn tabulated(table: TabulatedTail<T>) -> Self {
        let last = *table.nodes().last().expect("non-empty table");
        let bps = table.nodes().to_vec();
        Self {
            source: TailSource::Tabulated(table),
            t_min_support: T::zero(),
            t_max_support: last,
            breakpoints: bps,
        }
    }

    pub fn zero() -> Self {
        Self {
            source: TailSource::Zero,
            t_min_support: T::zero(),
            t_max_support: T::zero(),
            breakpoints: Vec::new(),
        }
    }

    pub fn eval(&self, t: T) -> Result<T> {
        self.ln_eval(check_t(t)?).map(T::exp)
    }

    /// `ln T(t)` from `ln t`; `-inf` where the tail vanishes.
    pub fn ln_eval(&self, ln_t: T) -> Result<T> {
        if ln_t.is_nan() {
            return Err(Error::domain("tail requires t > 0", f64::NAN));
        }
        match &self.source {
            TailSource::Model { model, level_set } => model.ln_tail(ln_t, *level_set),
            TailSource::Tabulated(tab) => Ok(tab.eval(ln_t.exp()).ln()),
            TailSource::Zero => Ok(T::neg_infinity()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, integrate_semi_infinite, QuadOptions, Transform};
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    fn outer(a: f64, gamma: f64, d: u32) -> OuterModel<f64> {
        OuterModel::new(a, gamma, d).unwrap()
    }
    fn inner(b: f64, nu: f64, d: u32) -> InnerModel<f64> {
        InnerModel::new(b, nu, d).unwrap()
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area::<f64>(1).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area::<f64>(2).unwrap(), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area::<f64>(3).unwrap(), 4.0 * PI, max_relative = 1e-14);
        assert!(sphere_area::<f64>(0).is_err());
    }

    #[test]
    fn pointwise() {
        assert_relative_eq!(eval_outer(&outer(1.0, 0.0, 1), 2.0), 0.5);
        assert_relative_eq!(
            eval_outer(&outer(2.0, 1.0, 1), E * E),
            2.0 / E,
            max_relative = 1e-15
        );
        assert_eq!(eval_outer(&outer(3.0, 2.0, 2), 1.0), 0.0);
        assert_relative_eq!(eval_inner(&inner(1.0, 1.0, 1), 1.0 / E), E, max_relative = 1e-15);
        assert_eq!(eval_inner(&inner(1.0, 1.0, 1), 1.0), 0.0);
        // r^{-1/2} · 2² at r = e^{-2}
        assert_relative_eq!(
            eval_inner(&inner(2.0, 2.0, 1), (-2.0f64).exp()),
            4.0 * E,
            max_relative = 1e-14
        );
    }

    /// Radial quadrature `S_{d-1} ∫ F(r)^p r^{d-1} dr`, split at `r = 1`.
    fn radial_norm_pow(model: &Model<f64>, p: f64) -> f64 {
        let d = model.dimension();
        let df = f64::from(d);
        let s = sphere_area::<f64>(d).unwrap();
        let opts = QuadOptions::with_rel_tol(1e-12);
        let inside = integrate(
            |r: f64| model.eval(r).powf(p) * r.powi(d as i32 - 1),
            0.0,
            1.0,
            opts,
        )
        .unwrap()
        .value;
        // r = e^u outside: F(e^u)^p e^{du} du, evaluated in log form
        let outside = integrate_semi_infinite(
            |u: f64| {
                let f = model.eval(u.exp());
                if f == 0.0 || !u.is_finite() {
                    0.0
                } else {
                    (p * f.ln() + df * u).exp()
                }
            },
            0.0,
            Transform::ExpDecay,
            opts,
        )
        .unwrap()
        .value;
        s * (inside + outside)
    }

    #[test]
    fn outer_norm_examples() {
        let m = outer(1.0, 0.0, 1);
        assert_relative_eq!(lp_norm_outer(&m, 2.0).unwrap(), 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(radial_norm_pow(&Model::Outer(m), 2.0), 2.0, max_relative = 1e-10);
        let m = outer(1.0, 1.0, 1);
        assert_relative_eq!(lp_norm_outer(&m, 2.0).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(radial_norm_pow(&Model::Outer(m), 2.0), 4.0, max_relative = 1e-10);
        assert!(matches!(
            lp_norm_outer(&outer(1.0, 0.0, 1), 1.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn inner_norm_examples() {
        let m = inner(1.0, 1.0, 2);
        assert_relative_eq!(lp_norm_inner(&m, 1.0).unwrap(), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(
            radial_norm_pow(&Model::Inner(m), 1.0),
            2.0 * PI,
            max_relative = 1e-9
        );
        assert!(matches!(lp_norm_inner(&m, 2.0), Err(Error::OutOfRange { .. })));
        assert!(matches!(lp_norm_inner(&m, 0.5), Err(Error::Domain { .. })));
        let m = inner(2.0, 1.0, 1);
        assert_relative_eq!(lp_norm_inner(&m, 1.0).unwrap(), 8.0, max_relative = 1e-14);
        assert_relative_eq!(radial_norm_pow(&Model::Inner(m), 1.0), 8.0, max_relative = 1e-9);
    }

    #[test]
    fn sum_norm_example() {
        let m = SumModel::new(outer(1.0, 0.0, 1), inner(2.0, 1.0, 1)).unwrap();
        // mpmath: (4 + 85.0777848434647693)^{2/3}
        let want = 19.945_561_752_148_201;
        assert_relative_eq!(lp_norm_sum(&m, 1.5).unwrap(), want, max_relative = 1e-13);
        assert_relative_eq!(
            radial_norm_pow(&Model::Sum(m), 1.5),
            want.powf(1.5),
            max_relative = 1e-9
        );
        assert!(lp_norm_sum(&m, 1.0).is_err());
        assert!(lp_norm_sum(&m, 2.0).is_err());
        assert!(SumModel::new(outer(2.0, 0.0, 1), inner(1.0, 1.0, 1)).is_err());
        assert!(SumModel::new(outer(1.0, 0.0, 1), inner(3.0, 1.0, 2)).is_err());
    }

    #[test]
    fn closed_forms_match_radial_quadrature_on_grid() {
        for d in [1u32, 2, 3] {
            for &(a, g) in &[(0.5, 0.0), (1.0, 1.0), (2.0, 0.5), (1.5, 2.0)] {
                let m = Model::Outer(outer(a, g, d));
                let crit = a * f64::from(d);
                for p in [crit * 1.3 + 0.1, crit * 2.0 + 0.5] {
                    let want = m.ln_lp_norm_pow(p).unwrap().exp();
                    assert_relative_eq!(radial_norm_pow(&m, p), want, max_relative = 1e-8);
                }
            }
            for &(b, nu) in &[(1.5, 0.5), (2.0, 1.0), (3.0, 2.0)] {
                let m = Model::Inner(inner(b, nu, d));
                let crit = b * f64::from(d);
                for p in [1.0, 0.5 * (1.0 + crit)] {
                    let want = m.ln_lp_norm_pow(p).unwrap().exp();
                    assert_relative_eq!(radial_norm_pow(&m, p), want, max_relative = 1e-8);
                }
            }
        }
    }

    #[test]
    fn sup_norms() {
        assert_relative_eq!(sup_norm_outer(&outer(2.0, 1.0, 1)), 2.0 / E, max_relative = 1e-15);
        assert_eq!(sup_norm_outer(&outer(5.0, 0.0, 1)), 1.0);
        assert_relative_eq!(
            sup_norm_outer(&outer(1.0, 2.0, 1)),
            4.0 / (E * E),
            max_relative = 1e-15
        );
        // grid maximization oracle on (1, 1e6)
        let m = outer(1.0, 2.0, 1);
        let dense = (1..=200_000)
            .map(|k| (f64::from(k) / 200_000.0 * 6.0 * 10f64.ln()).exp())
            .map(|r| eval_outer(&m, r))
            .fold(0.0, f64::max);
        assert!((dense - sup_norm_outer(&m)).abs() < 1e-9);
    }

    #[test]
    fn outer_tail_examples() {
        let m = outer(1.0, 0.0, 1);
        assert_relative_eq!(
            tail_outer(&m, 0.5, LevelSet::Shell).unwrap(),
            2.0,
            max_relative = 1e-14
        );
        assert_eq!(tail_outer(&m, 2.0, LevelSet::Shell).unwrap(), 0.0);
        let m = outer(1.0, 1.0, 1);
        // mpmath roots of ln(r)/r = 0.1: r₂ = 35.7715206395729722, r₁ = 1.11832559158962965
        assert_relative_eq!(
            tail_outer(&m, 0.1, LevelSet::Shell).unwrap(),
            69.543_041_279_145_944,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            tail_outer(&m, 0.1, LevelSet::Exact).unwrap(),
            69.306_390_095_966_685,
            max_relative = 1e-12
        );
    }

    #[test]
    fn outer_tail_vanishes_above_sup() {
        for m in [outer(1.0, 1.0, 2), outer(2.0, 0.5, 1), outer(0.5, 3.0, 3)] {
            let sup = sup_norm_outer(&m);
            for ls in [LevelSet::Shell, LevelSet::Exact] {
                assert_eq!(tail_outer(&m, sup * (1.0 + 1e-12), ls).unwrap(), 0.0);
                assert!(tail_outer(&m, sup * 0.999, ls).unwrap() > 0.0);
            }
            // both roots meet at the peak
            assert!(tail_outer(&m, sup, LevelSet::Exact).unwrap() < 1e-6);
        }
    }

    #[test]
    fn inner_tail_examples() {
        let m = inner(1.0, 1.0, 1);
        // s + ln s = ln 10, s = 1.74552800274069938 (mpmath); r = e^{-s}
        assert_relative_eq!(
            tail_inner(&m, 10.0).unwrap(),
            0.349_105_600_548_139_88,
            max_relative = 1e-12
        );
        assert_relative_eq!(tail_inner(&m, 1e-12).unwrap(), 2.0, max_relative = 1e-9);
        assert_relative_eq!(tail_inner(&m, 1e-300).unwrap(), 2.0, max_relative = 1e-12);
        let m = inner(1.0, 1.0, 2);
        assert_relative_eq!(
            tail_inner(&m, 10.0).unwrap(),
            0.095_720_181_514_962_039,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sum_tail_adds_components() {
        let m = SumModel::new(outer(1.0, 0.0, 1), inner(2.0, 1.0, 1)).unwrap();
        let t = 0.5;
        let want = 2.0 + tail_inner(&m.inner, t).unwrap();
        assert_relative_eq!(
            tail_sum(&m, t, LevelSet::Shell).unwrap(),
            want,
            max_relative = 1e-14
        );
        // above the outer sup-norm only the inner part remains
        assert_eq!(
            tail_sum(&m, 3.0, LevelSet::Shell).unwrap(),
            tail_inner(&m.inner, 3.0).unwrap()
        );
        let big = 1e12;
        let ratio = tail_sum(&m, big, LevelSet::Shell).unwrap()
            / tail_asymptotic_inner(&m.inner, big, AsymptoticVariant::Corrected).unwrap();
        // leading order only: the ratio approaches 1 from below like (s/(b ln t))^{bνd}
        assert!(ratio > 0.6 && ratio < 1.0, "{ratio}");
    }

    #[test]
    fn asymptotic_formulas() {
        let m = outer(1.0, 0.0, 1);
        assert_relative_eq!(
            tail_asymptotic_outer(&m, 0.5, AsymptoticVariant::Classic).unwrap(),
            4.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            tail_asymptotic_outer(&m, 0.01, AsymptoticVariant::Classic).unwrap(),
            200.0,
            max_relative = 1e-13
        );
        let m = outer(1.0, 1.0, 1);
        assert_relative_eq!(
            tail_asymptotic_outer(&m, 0.01, AsymptoticVariant::Classic).unwrap(),
            921.034_037_197_618_27,
            max_relative = 1e-13
        );
        let m = inner(1.0, 1.0, 1);
        assert_relative_eq!(
            tail_asymptotic_inner(&m, E, AsymptoticVariant::Classic).unwrap(),
            2.0 / E,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            tail_asymptotic_inner(&m, 10.0, AsymptoticVariant::Classic).unwrap(),
            0.460_517_018_598_809_14,
            max_relative = 1e-13
        );
        let m = inner(1.0, 1.0, 2);
        assert_relative_eq!(
            tail_asymptotic_inner(&m, 10.0, AsymptoticVariant::Classic).unwrap(),
            0.166_564_041_539_605_41,
            max_relative = 1e-13
        );
        // variants coincide for a = 1
        let m = outer(1.0, 2.0, 2);
        assert_eq!(
            tail_asymptotic_outer(&m, 1e-3, AsymptoticVariant::Classic).unwrap(),
            tail_asymptotic_outer(&m, 1e-3, AsymptoticVariant::Corrected).unwrap()
        );
        assert!(tail_asymptotic_outer(&m, 2.0, AsymptoticVariant::Classic).is_err());
    }

    #[test]
    fn gamma_zero_asymptotic_ratio() {
        let m = outer(1.0, 0.0, 1);
        let t = 1e-6;
        let r = tail_outer(&m, t, LevelSet::Shell).unwrap()
            / tail_asymptotic_outer(&m, t, AsymptoticVariant::Classic).unwrap();
        assert!((r - 1.0).abs() < 1e-5);
    }

    #[test]
    fn tails_are_nonincreasing() {
        let models = [
            Model::Outer(outer(1.0, 1.0, 1)),
            Model::Outer(outer(2.0, 0.5, 2)),
            Model::Inner(inner(1.0, 1.0, 2)),
            Model::Sum(SumModel::new(outer(1.0, 1.0, 1), inner(2.0, 1.0, 1)).unwrap()),
        ];
        for m in models {
            for ls in [LevelSet::Shell, LevelSet::Exact] {
                let mut prev = f64::INFINITY;
                for k in 0..1000 {
                    let t = 10f64.powf(-8.0 + 16.0 * f64::from(k) / 999.0);
                    let v = m.tail(t, ls).unwrap();
                    assert!(v <= prev * (1.0 + 1e-12), "{} at t={t}", m.label());
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn integrability_intervals() {
        let i = Model::Outer(outer(1.0, 0.0, 1)).integrability().unwrap();
        assert_eq!((i.lo, i.hi, i.lo_closed), (1.0, f64::INFINITY, false));
        let i = Model::Inner(inner(1.0, 1.0, 2)).integrability().unwrap();
        assert_eq!((i.lo, i.hi, i.lo_closed), (1.0, 2.0, true));
        assert!(Model::Inner(inner(1.0, 1.0, 1)).integrability().is_err());
        let s = SumModel::new(outer(1.0, 0.0, 2), inner(2.0, 1.0, 2)).unwrap();
        let i = Model::Sum(s).integrability().unwrap();
        assert_eq!((i.lo, i.hi), (2.0, 4.0));
    }

    #[test]
    fn tabulated_tail() {
        let tab = TabulatedTail::new(vec![0.5, 1.0, 2.0], vec![4.0, 2.0, 0.0]).unwrap();
        assert_eq!(tab.eval(0.1), 4.0);
        assert_eq!(tab.eval(0.75), 3.0);
        assert_eq!(tab.eval(3.0), 0.0);
        assert!(TabulatedTail::new(vec![1.0, 0.5], vec![1.0, 0.0]).is_err());
        assert!(TabulatedTail::new(vec![0.5, 1.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn single_precision_norms() {
        let m = OuterModel::new(1.0_f32, 1.0, 1).unwrap();
        assert!((lp_norm_outer(&m, 2.0).unwrap() - 2.0).abs() < 1e-5);
        let t = tail_outer(&m, 0.1_f32, LevelSet::Shell).unwrap();
        assert!((t - 69.543_04).abs() < 1e-3);
    }
}
