//! Globally adaptive 7/15-point Gauss-Kronrod quadrature on finite intervals,
//! and semi-infinite integrals through a map onto `(0, 1)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const DEFAULT_MAX_EVALUATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct QuadratureResult<T: Scalar> {
    pub value: T,
    pub abs_error_estimate: T,
    pub evaluations: usize,
}

/// Change of variables used to bring `(lo, inf)` onto `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// `u = lo + s / (1 - s)`; suited to exponentially decaying integrands.
    ExpDecay,
    /// `u = lo + expm1(s / (1 - s))`; turns power-law decay into
    /// exponential decay before the rational map.
    PowerDecay,
    /// `ExpDecay`, retried with `PowerDecay` if the budget runs out.
    Auto,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_evaluations: usize,
}

impl<T: Scalar> QuadOptions<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol: T::zero(),
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        }
    }
}

impl<T: Scalar> Default for QuadOptions<T> {
    fn default() -> Self {
        Self::with_rel_tol(T::lit(1e-10).max(T::epsilon() * T::lit(64.0)))
    }
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Segment<T> {}
impl<T: Scalar> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.as_f64().total_cmp(&other.error.as_f64())
    }
}

struct Rule<T> {
    value: T,
    error: T,
    /// integral of |f|, used for the roundoff floor
    abs_value: T,
}

fn gauss_kronrod<T, F>(f: &mut F, a: T, b: T) -> Result<Rule<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let mut eval = |x: T| -> Result<T> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Evaluation(format!(
                "integrand is {} at {}",
                y.as_f64(),
                x.as_f64()
            )))
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    let mut abs_k = kronrod.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        kronrod = kronrod + w * (f1 + f2);
        abs_k = abs_k + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = kronrod * half;
    let mut asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        asc = asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half_len.abs();
    let value = kronrod * half_len;
    let abs_value = abs_k * scale;
    let asc = asc * scale;
    let mut error = ((kronrod - gauss) * half_len).abs();
    if asc != T::zero() && error != T::zero() {
        let r = (T::lit(200.0) * error / asc).powf(T::lit(1.5));
        error = asc * r.min(T::one());
    }
    let roundoff = T::lit(50.0) * T::epsilon() * abs_value;
    if abs_value > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        error = error.max(roundoff);
    }
    Ok(Rule {
        value,
        error,
        abs_value,
    })
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> Result<QuadratureResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(
            "integrate needs finite limits; use integrate_semi_infinite".into(),
        ));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::zero(),
            abs_error_estimate: T::zero(),
            evaluations: 0,
        });
    }
    if b < a {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadratureResult { value: -r.value, ..r });
    }

    let first = gauss_kronrod(&mut f, a, b)?;
    let mut evaluations = 15usize;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_abs = first.abs_value;
    let mut heap = BinaryHeap::new();
    // segments too narrow to split keep their error in `frozen_err`
    let mut frozen_err = T::zero();
    heap.push(Segment {
        a,
        b,
        value: first.value,
        error: first.error,
    });

    let tiny = T::lit(100.0) * T::epsilon();
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if total_err <= T::lit(50.0) * T::epsilon() * total_abs {
            break;
        }
        let Some(seg) = heap.pop() else { break };
        if evaluations + 30 > opts.max_evaluations {
            heap.push(seg);
            return Err(Error::Convergence {
                partial: total.as_f64(),
                abs_error: total_err.as_f64(),
                evaluations,
            });
        }
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if (seg.b - seg.a) <= tiny * seg.a.abs().max(seg.b.abs()) || mid <= seg.a || mid >= seg.b {
            frozen_err = frozen_err + seg.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = gauss_kronrod(&mut f, seg.a, mid)?;
        let right = gauss_kronrod(&mut f, mid, seg.b)?;
        evaluations += 30;
        total = total - seg.value + left.value + right.value;
        total_abs = total_abs + left.abs_value + right.abs_value;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: left.value,
            error: left.error,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: right.value,
            error: right.error,
        });
        total_err = total_err - seg.error + left.error + right.error;
        // re-sum periodically to avoid drift from repeated subtraction
        if heap.len() % 64 == 0 {
            total = heap.iter().fold(T::zero(), |acc, s| acc + s.value);
            total_err = frozen_err + heap.iter().fold(T::zero(), |acc, s| acc + s.error);
        }
    }
    let value = heap.iter().fold(T::zero(), |acc, s| acc + s.value);
    let abs_error_estimate = frozen_err + heap.iter().fold(T::zero(), |acc, s| acc + s.error);
    let target = opts.abs_tol.max(opts.rel_tol * value.abs());
    if abs_error_estimate > target
        && abs_error_estimate > T::lit(50.0) * T::epsilon() * total_abs * T::lit(10.0)
    {
        return Err(Error::Convergence {
            partial: value.as_f64(),
            abs_error: abs_error_estimate.as_f64(),
            evaluations,
        });
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate,
        evaluations,
    })
}

/// Integrate `f` over `(lo, inf)`.
///
/// Points where the map overflows (`u = inf`) contribute zero; the integrand
/// is assumed to decay there.
pub fn integrate_semi_infinite<T, F>(
    mut f: F,
    lo: T,
    transform: Transform,
    opts: QuadOptions<T>,
) -> Result<QuadratureResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    if !(opts.rel_tol > T::zero()) {
        return Err(Error::InvalidParameter("rel_tol must be positive".into()));
    }
    match transform {
        Transform::ExpDecay | Transform::PowerDecay => mapped_integral(&mut f, lo, transform, opts),
        Transform::Auto => match mapped_integral(&mut f, lo, Transform::ExpDecay, opts) {
            Err(Error::Convergence { evaluations, .. }) => {
                let mut r = mapped_integral(&mut f, lo, Transform::PowerDecay, opts)?;
                r.evaluations += evaluations;
                Ok(r)
            }
            other => other,
        },
    }
}

fn mapped_integral<T, F>(
    f: &mut F,
    lo: T,
    transform: Transform,
    opts: QuadOptions<T>,
) -> Result<QuadratureResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let power = transform == Transform::PowerDecay;
    integrate(
        |s: T| {
            let w = T::one() - s;
            let v = s / w;
            let (u, jac) = if power {
                (lo + v.exp_m1(), v.exp() / (w * w))
            } else {
                (lo + v, (w * w).recip())
            };
            mapped(f, u, jac)
        },
        T::zero(),
        T::one(),
        opts,
    )
}

#[inline]
fn mapped<T: Scalar, F: FnMut(T) -> T>(f: &mut F, u: T, jac: T) -> T {
    if !u.is_finite() || !jac.is_finite() {
        return T::zero();
    }
    let y = f(u);
    if y == T::zero() {
        T::zero()
    } else {
        y * jac
    }
}
