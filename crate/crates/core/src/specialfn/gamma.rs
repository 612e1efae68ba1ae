use std::f64::consts::PI;

use super::{Sign, SignedLogValue};
use crate::error::{Error, Result};

/// Arguments closer than this to a non-positive integer are treated as poles.
pub const POLE_TOLERANCE: f64 = 1e-12;

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
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

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// True when `x` is within [`POLE_TOLERANCE`] of `0, -1, -2, ...`.
pub fn is_pole(x: f64) -> bool {
    x <= POLE_TOLERANCE && (x - x.round()).abs() < POLE_TOLERANCE
}

/// `sin(πx)` with exact argument reduction, so large |x| keeps full accuracy.
fn sin_pi(x: f64) -> f64 {
    let mut r = x - 2.0 * (x / 2.0).round();
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

/// ln Γ(x) for x ≥ 1/2 via the Lanczos series.
fn ln_gamma_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// ln|Γ(x)| together with the sign of Γ(x).
pub fn log_gamma_signed(x: f64) -> Result<SignedLogValue> {
    if !x.is_finite() {
        return Err(Error::Domain {
            what: "log_gamma_signed needs a finite argument",
            value: x,
        });
    }
    if is_pole(x) {
        return Err(Error::PoleArgument(x));
    }
    if x >= 0.5 {
        return Ok(SignedLogValue::new(ln_gamma_lanczos(x), Sign::Positive));
    }
    // Γ(x) Γ(1-x) = π / sin(πx); Γ(1-x) > 0 here.
    let s = sin_pi(x);
    let sign = if s > 0.0 {
        Sign::Positive
    } else {
        Sign::Negative
    };
    let log_magnitude = PI.ln() - s.abs().ln() - ln_gamma_lanczos(1.0 - x);
    Ok(SignedLogValue::new(log_magnitude, sign))
}

/// Γ(a)/Γ(b).
///
/// Returns an exact zero when only `b` is a pole and [`Error::RatioPole`]
/// when only `a` is. Both at poles is rejected as [`Error::DegenerateRatio`].
pub fn gamma_ratio(a: f64, b: f64) -> Result<SignedLogValue> {
    match (is_pole(a), is_pole(b)) {
        (true, true) => Err(Error::DegenerateRatio { a, b }),
        (true, false) => Err(Error::RatioPole { a, b }),
        (false, true) => Ok(SignedLogValue::ZERO),
        (false, false) => {
            if a == b {
                return Ok(SignedLogValue::ONE);
            }
            Ok(log_gamma_signed(a)? / log_gamma_signed(b)?)
        }
    }
}

/// Exact double factorial for `k ≥ -1`, with `(-1)!! = 0!! = 1`.
pub fn double_factorial(k: i64) -> Result<u64> {
    if k < -1 {
        return Err(Error::Domain {
            what: "double factorial needs k >= -1",
            value: k as f64,
        });
    }
    let mut acc: u64 = 1;
    let mut i = k;
    while i > 1 {
        acc = acc
            .checked_mul(i as u64)
            .ok_or(Error::FactorialOverflow { k })?;
        i -= 2;
    }
    Ok(acc)
}
