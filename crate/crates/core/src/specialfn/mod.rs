//! Special-function kernel used by every spectral and scattering formula.

mod bessel;
mod gamma;

pub use bessel::{irregular_reduced, regular_reduced, spherical_bessel, BesselKind, Derivative};
pub use gamma::{double_factorial, gamma_ratio, is_pole, log_gamma_signed, POLE_TOLERANCE};

use std::ops::{Div, Mul, Neg};

/// Sign of a value kept in logarithmic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
    /// The value is an exact zero; `log_magnitude` is `-inf`.
    Zero,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
        }
    }

    fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// A real number stored as `sign · exp(log_magnitude)`.
///
/// Gamma values overflow `f64` long before the ratios built from them do,
/// so the spectral formulas carry their factors in this form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogValue {
    pub log_magnitude: f64,
    pub sign: Sign,
}

impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        log_magnitude: f64::NEG_INFINITY,
        sign: Sign::Zero,
    };

    pub const ONE: SignedLogValue = SignedLogValue {
        log_magnitude: 0.0,
        sign: Sign::Positive,
    };

    pub fn new(log_magnitude: f64, sign: Sign) -> Self {
        if sign == Sign::Zero {
            Self::ZERO
        } else {
            SignedLogValue {
                log_magnitude,
                sign,
            }
        }
    }

    pub fn from_value(x: f64) -> Self {
        match Sign::of(x) {
            Sign::Zero => Self::ZERO,
            s => SignedLogValue {
                log_magnitude: x.abs().ln(),
                sign: s,
            },
        }
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            s => s.as_f64() * self.log_magnitude.exp(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// Reciprocal; `None` for an exact zero.
    pub fn recip(&self) -> Option<Self> {
        match self.sign {
            Sign::Zero => None,
            s => Some(SignedLogValue {
                log_magnitude: -self.log_magnitude,
                sign: s,
            }),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        *self * SignedLogValue::from_value(factor)
    }
}

impl Mul for SignedLogValue {
    type Output = SignedLogValue;

    fn mul(self, rhs: SignedLogValue) -> SignedLogValue {
        SignedLogValue::new(self.log_magnitude + rhs.log_magnitude, self.sign * rhs.sign)
    }
}

impl Div for SignedLogValue {
    type Output = SignedLogValue;

    /// Panics when dividing by an exact zero.
    fn div(self, rhs: SignedLogValue) -> SignedLogValue {
        let inv = rhs
            .recip()
            .expect("division by an exact zero SignedLogValue");
        self * inv
    }
}

impl Neg for SignedLogValue {
    type Output = SignedLogValue;

    fn neg(self) -> SignedLogValue {
        let sign = match self.sign {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
        };
        SignedLogValue { sign, ..self }
    }
}
