//! Tail estimates from `L^p`-norm profiles.
//!
//! The pipeline runs from explicit radial model functions (closed-form norms,
//! exact level-set tails) through Grand Lebesgue norms and Young–Fenchel
//! envelopes to tail bounds for operators whose `L^p` growth follows a
//! Riesz-type law.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common cases. [`verify`] and the
//! number formatting in [`io`] work in `f64`.

// `!(x > 0)` is used deliberately so that NaN fails validation; reference
// values are frozen at full printed precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod fenchel;
pub mod gls;
pub mod io;
pub mod model;
pub mod numerics;
pub mod operator;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Interval64 = numerics::Interval<f64>;
pub type OuterModel64 = model::OuterModel<f64>;
pub type InnerModel64 = model::InnerModel<f64>;
pub type SumModel64 = model::SumModel<f64>;
pub type Model64 = model::Model<f64>;
pub type TailCurve64 = model::TailCurve<f64>;
pub type LpProfile64 = gls::LpProfile<f64>;
pub type GeneratingFunction64 = gls::GeneratingFunction<f64>;
pub type GlsNorm64 = gls::GlsNorm<f64>;
pub type BoundReport64 = fenchel::BoundReport<f64>;
pub type OperatorProfile64 = operator::OperatorProfile<f64>;
pub type MaximizeOptions64 = numerics::MaximizeOptions<f64>;

pub type Interval32 = numerics::Interval<f32>;
pub type Model32 = model::Model<f32>;
pub type GeneratingFunction32 = gls::GeneratingFunction<f32>;
pub type BoundReport32 = fenchel::BoundReport<f32>;
pub type OperatorProfile32 = operator::OperatorProfile<f32>;
