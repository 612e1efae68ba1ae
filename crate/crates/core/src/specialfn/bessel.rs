//! Spherical Bessel functions of order 0..2 and their entire "reduced" forms.
//!
//! The reduced functions are entire in `z = x²`:
//!
//! * `F_l(z) = x^{-l} j_l(x)` for `l = -1..=3` (with `F_{-1} = cos x`),
//! * `G_l(z) = x^{l+1} n_l(x)` for `l = -1..=2` (with `G_{-1} = sin x / x`).
//!
//! For `z < 0` they are evaluated at `x = iκ` in real arithmetic through
//! hyperbolic functions, which is the continuation of matching formulas to
//! imaginary wavenumber. They obey `F_l' = -F_{l+1}/2` and `G_l' = G_{l-1}/2`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    /// Regular solution `j_l`.
    Regular,
    /// Irregular (Neumann) solution `n_l`, `n_0(x) = -cos x / x`.
    Irregular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    Value,
    First,
}

// Below this |z| the power series is used for F_l.
const SERIES_LIMIT: f64 = 4.0;

/// `(2l+1)!!` as a float for the small `l` used here.
fn odd_double_factorial(n: i32) -> f64 {
    let mut acc = 1.0;
    let mut i = n;
    while i > 1 {
        acc *= i as f64;
        i -= 2;
    }
    acc
}

fn regular_series(l: i32, z: f64) -> f64 {
    // Σ_k (-z/2)^k / (k! (2l+2k+1)!!)
    let mut term = 1.0 / odd_double_factorial(2 * l + 1);
    let mut sum = term;
    for k in 1..60 {
        term *= -z / (2.0 * k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `F_l(z) = x^{-l} j_l(x)` with `x = sqrt(z)`, for `l ∈ -1..=3` and any real `z`.
pub fn regular_reduced(l: i32, z: f64) -> f64 {
    assert!(
        (-1..=3).contains(&l),
        "regular_reduced supports l in -1..=3"
    );
    if l == -1 {
        return if z >= 0.0 {
            z.sqrt().cos()
        } else {
            (-z).sqrt().cosh()
        };
    }
    if z.abs() < SERIES_LIMIT {
        return regular_series(l, z);
    }
    if z > 0.0 {
        let x = z.sqrt();
        let (s, c) = x.sin_cos();
        match l {
            0 => s / x,
            1 => (s - x * c) / (x * z),
            2 => ((3.0 - z) * s - 3.0 * x * c) / (x * z * z),
            _ => ((15.0 - 6.0 * z) * s - (15.0 - z) * x * c) / (x * z * z * z),
        }
    } else {
        let k = (-z).sqrt();
        let (sh, ch) = (k.sinh(), k.cosh());
        let k2 = -z;
        match l {
            0 => sh / k,
            1 => (k * ch - sh) / (k * k2),
            2 => ((3.0 + k2) * sh - 3.0 * k * ch) / (k * k2 * k2),
            _ => ((15.0 + k2) * k * ch - (15.0 + 6.0 * k2) * sh) / (k * k2 * k2 * k2),
        }
    }
}

/// `G_l(z) = x^{l+1} n_l(x)` with `x = sqrt(z)`, for `l ∈ -1..=2` and any real `z`.
pub fn irregular_reduced(l: i32, z: f64) -> f64 {
    assert!(
        (-1..=2).contains(&l),
        "irregular_reduced supports l in -1..=2"
    );
    if l == -1 {
        return regular_reduced(0, z);
    }
    if z >= 0.0 {
        let x = z.sqrt();
        let (s, c) = x.sin_cos();
        match l {
            0 => -c,
            1 => -c - x * s,
            _ => (z - 3.0) * c - 3.0 * x * s,
        }
    } else {
        let k = (-z).sqrt();
        let (sh, ch) = (k.sinh(), k.cosh());
        match l {
            0 => -ch,
            1 => -ch + k * sh,
            _ => (z - 3.0) * ch + 3.0 * k * sh,
        }
    }
}

fn value(l: i32, x: f64, kind: BesselKind) -> f64 {
    let z = x * x;
    match kind {
        BesselKind::Regular => x.powi(l) * regular_reduced(l, z),
        BesselKind::Irregular => irregular_reduced(l, z) / x.powi(l + 1),
    }
}

/// Spherical Bessel `j_l` / Neumann `n_l` (or first derivative) for `l ∈ 0..=2`, `x > 0`.
pub fn spherical_bessel(l: u32, x: f64, kind: BesselKind, derivative: Derivative) -> Result<f64> {
    if l > 2 {
        return Err(Error::Domain {
            what: "spherical_bessel supports l = 0, 1, 2",
            value: l as f64,
        });
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "spherical_bessel needs x > 0",
            value: x,
        });
    }
    let l = l as i32;
    Ok(match derivative {
        Derivative::Value => value(l, x, kind),
        Derivative::First if l == 0 => -value(1, x, kind),
        Derivative::First => value(l - 1, x, kind) - (l + 1) as f64 / x * value(l, x, kind),
    })
}
