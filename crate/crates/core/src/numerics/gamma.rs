//! Log-Gamma via the Lanczos approximation (g = 7, n = 9) with reflection
//! below 1/2, and the Stirling series for large arguments.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Above this the asymptotic series is used; the Lanczos form loses a few
/// ulps to the `(z + 1/2) ln t - t` cancellation for large `z`.
const STIRLING_FROM: f64 = 12.0;

// B_{2k} / (2k (2k - 1)) for k = 1..8
const STIRLING_COEF: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Γ(z)` for `z > 0`.
pub fn gamma_ln<T: Scalar>(z: T) -> Result<T> {
    if !(z > T::zero()) || !z.is_finite() {
        return Err(Error::domain("gamma_ln requires a finite z > 0", z.as_f64()));
    }
    Ok(ln_gamma_pos(z))
}

fn ln_gamma_pos<T: Scalar>(z: T) -> T {
    let half = T::lit(0.5);
    if z < half {
        // Γ(z)Γ(1 - z) = π / sin(πz); sin(πz) > 0 on (0, 1/2)
        let pi = T::PI();
        return pi.ln() - (pi * z).sin().ln() - ln_gamma_pos(T::one() - z);
    }
    if z >= T::lit(STIRLING_FROM) {
        return stirling(z);
    }
    let zm1 = z - T::one();
    let mut x = T::lit(LANCZOS_COEF[0]);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x = x + T::lit(c) / (zm1 + T::from_usize_lossy(i));
    }
    let t = zm1 + T::lit(LANCZOS_G) + half;
    half * T::TAU().ln() + (zm1 + half) * t.ln() - t + x.ln()
}

fn stirling<T: Scalar>(z: T) -> T {
    let half = T::lit(0.5);
    let inv = z.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    for &c in STIRLING_COEF.iter().rev() {
        series = series * inv2 + T::lit(c);
    }
    // (z - 1/2)(ln z - 1) keeps the two large terms in one product
    (z - half) * (z.ln() - T::one()) - half + half * T::TAU().ln() + series * inv
}
