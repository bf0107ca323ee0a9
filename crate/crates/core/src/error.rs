use thiserror::Error;

/// Errors raised across the pipeline.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: String, value: f64 },

    #[error("out of integrability range: p = {p} not in {range}")]
    OutOfRange { p: f64, range: String },

    #[error("empty interval: {0}")]
    EmptyInterval(String),

    #[error("quadrature did not converge after {evaluations} evaluations (partial value {partial}, error estimate {abs_error})")]
    Convergence {
        partial: f64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("root not bracketed: g({lo}) = {g_lo}, g({hi}) = {g_hi}, target {target}")]
    Bracket {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
        target: f64,
    },

    #[error("monotonicity contract violated near r = {at}")]
    Contract { at: f64 },

    #[error("objective could not be evaluated: {0}")]
    Evaluation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("table error: {0}")]
    Table(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(what: impl Into<String>, value: f64) -> Self {
        Error::Domain {
            what: what.into(),
            value,
        }
    }
}
