//! Free-space scattering on an attractive square well.
//!
//! Interior and exterior solutions are matched at the well edge using the
//! reduced Bessel functions of [`crate::specialfn`]. Writing `ρ = kR` and
//! `z = (k² + 2U) R²`, the matching gives
//!
//! ```text
//! tan δ_l = ρ^{2l+1} N / D
//! N = z F_{l+1}(z) F_l(ρ²) − ρ² F_l(z) F_{l+1}(ρ²)
//! D = ρ² F_l(z) G_{l-1}(ρ²) − F_{l-1}(z) G_l(ρ²)
//! ```
//!
//! `N` and `D` are entire in `k²`, so `a_l(k)^{2l+1} = −R^{2l+1} N / D`
//! continues to negative energies by plain evaluation, and the zero-energy
//! limit is exact at `k² = 0`.

use crate::error::{Error, Result};
use crate::specialfn::{irregular_reduced, regular_reduced};

/// Attractive square well `V(r) = −depth` for `r < radius`, in trap units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareWellPotential {
    depth: f64,
    radius: f64,
}

impl SquareWellPotential {
    /// `depth ≥ 0` (attraction) in `ħω`, `radius > 0` in `d`.
    pub fn new(depth: f64, radius: f64) -> Result<Self> {
        if !(depth >= 0.0) || !depth.is_finite() {
            return Err(Error::Domain {
                what: "well depth must be finite and >= 0",
                value: depth,
            });
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain {
                what: "well radius must be finite and > 0",
                value: radius,
            });
        }
        Ok(SquareWellPotential { depth, radius })
    }

    /// Builds a well from the signed convention where a negative `U` is attractive.
    pub fn from_signed_depth(u: f64, radius: f64) -> Result<Self> {
        if u > 0.0 {
            return Err(Error::Domain {
                what: "signed well depth U must be <= 0 (negative is attractive)",
                value: u,
            });
        }
        Self::new(-u, radius)
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Interior wavenumber at zero energy, `K₀ = sqrt(2U)`.
    pub fn k0(&self) -> f64 {
        (2.0 * self.depth).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShiftPoint {
    pub l: u32,
    pub k: f64,
    /// Phase shift reduced to `(−π/2, π/2]`.
    pub delta: f64,
    pub tan_delta: f64,
}

/// The pair `(N, D)` of the matching formula at a given `k²`.
///
/// The strength is `a_l^{2l+1} = −R^{2l+1} N / D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingFraction {
    pub numerator: f64,
    pub denominator: f64,
}

fn check_l(l: u32) -> Result<i32> {
    if l > 2 {
        return Err(Error::Domain {
            what: "partial wave l must be 0, 1 or 2",
            value: l as f64,
        });
    }
    Ok(l as i32)
}

/// Matching fraction at squared wavenumber `k2` (any sign).
pub fn matching_fraction(well: &SquareWellPotential, l: u32, k2: f64) -> Result<MatchingFraction> {
    let l = check_l(l)?;
    let r2 = well.radius * well.radius;
    let rho2 = k2 * r2;
    let z = (k2 + 2.0 * well.depth) * r2;
    let f_l_in = regular_reduced(l, z);
    // without a well the two products are identical
    let numerator = if well.depth == 0.0 {
        0.0
    } else {
        z * regular_reduced(l + 1, z) * regular_reduced(l, rho2)
            - rho2 * f_l_in * regular_reduced(l + 1, rho2)
    };
    let denominator = rho2 * f_l_in * irregular_reduced(l - 1, rho2)
        - regular_reduced(l - 1, z) * irregular_reduced(l, rho2);
    Ok(MatchingFraction {
        numerator,
        denominator,
    })
}

pub fn phase_shift(well: &SquareWellPotential, l: u32, k: f64) -> Result<PhaseShiftPoint> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain {
            what: "phase_shift needs k > 0",
            value: k,
        });
    }
    let m = matching_fraction(well, l, k * k)?;
    let rho = k * well.radius;
    let tan_delta = rho.powi(2 * l as i32 + 1) * m.numerator / m.denominator;
    // atan2 keeps the division-free form when the denominator vanishes.
    let mut delta = (rho.powi(2 * l as i32 + 1) * m.numerator).atan2(m.denominator);
    if delta > std::f64::consts::FRAC_PI_2 {
        delta -= std::f64::consts::PI;
    } else if delta <= -std::f64::consts::FRAC_PI_2 {
        delta += std::f64::consts::PI;
    }
    Ok(PhaseShiftPoint {
        l,
        k,
        delta,
        tan_delta,
    })
}

/// Guard on `|a_l^{2l+1}| / R^{2l+1}` beyond which the zero-energy strength
/// is reported as a threshold.
pub const STRENGTH_OVERFLOW: f64 = 1e13;

/// `lim_{k→0} −tan δ_l / k^{2l+1}` from the closed zero-energy solution.
pub fn zero_energy_strength(well: &SquareWellPotential, l: u32) -> Result<f64> {
    let m = matching_fraction(well, l, 0.0)?;
    let scale = well.radius.powi(2 * l as i32 + 1);
    let ratio = m.numerator / m.denominator;
    if !ratio.is_finite() || ratio.abs() > STRENGTH_OVERFLOW {
        return Err(Error::Threshold {
            l,
            denominator: m.denominator,
        });
    }
    Ok(-scale * ratio)
}

/// s-wave scattering length `a_s` in `d`.
pub fn scattering_length_s(well: &SquareWellPotential) -> Result<f64> {
    zero_energy_strength(well, 0)
}

/// p-wave scattering volume `a_p³` in `d³`.
pub fn scattering_volume_p(well: &SquareWellPotential) -> Result<f64> {
    zero_energy_strength(well, 1)
}

/// d-wave scattering hyper-volume `a_d⁵` in `d⁵`.
pub fn scattering_hypervolume_d(well: &SquareWellPotential) -> Result<f64> {
    zero_energy_strength(well, 2)
}

/// `a_l(k)^{2l+1}` at relative energy `energy` (in `ħω`), with `k² = 2·energy`.
///
/// Negative energies use the real continuation in `k²`. The result is
/// infinite exactly where the denominator of the matching fraction vanishes.
pub fn energy_dependent_strength(well: &SquareWellPotential, l: u32, energy: f64) -> Result<f64> {
    let m = matching_fraction(well, l, 2.0 * energy)?;
    Ok(-well.radius.powi(2 * l as i32 + 1) * m.numerator / m.denominator)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRangeFit {
    /// Effective range `R*` in `d`.
    pub r_star: f64,
    /// Coefficient of the `k⁴` term absorbed by the fit.
    pub quartic: f64,
    /// RMS fit residual relative to the RMS of the fitted data.
    pub residual: f64,
}

const EFFECTIVE_RANGE_POINTS: usize = 32;
const EFFECTIVE_RANGE_KR: (f64, f64) = (1e-3, 5e-2);
const EFFECTIVE_RANGE_RESIDUAL: f64 = 1e-4;

/// Fits `k³ cot δ₁ + 1/a_p³ = −k²/(2R*) + c k⁴` over `k R₀ ∈ [0.001, 0.05]`.
pub fn effective_range_p(well: &SquareWellPotential) -> Result<EffectiveRangeFit> {
    let a3 = scattering_volume_p(well)?;
    if a3 == 0.0 {
        return Err(Error::EffectiveRangeUndefined(a3));
    }
    let r = well.radius;
    let (lo, hi) = EFFECTIVE_RANGE_KR;
    let ratio = (hi / lo).powf(1.0 / (EFFECTIVE_RANGE_POINTS - 1) as f64);

    // Normal equations for y = s·(−k²/2) + c·k⁴.
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut samples = Vec::with_capacity(EFFECTIVE_RANGE_POINTS);
    for i in 0..EFFECTIVE_RANGE_POINTS {
        let k = lo * ratio.powi(i as i32) / r;
        let m = matching_fraction(well, 1, k * k)?;
        // k³ cot δ₁ = −1/a(k)³ = D / (R³ N)
        let y = m.denominator / (r.powi(3) * m.numerator) + 1.0 / a3;
        let x1 = -0.5 * k * k;
        let x2 = k.powi(4);
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1 * y;
        b2 += x2 * y;
        samples.push((x1, x2, y));
    }
    let det = s11 * s22 - s12 * s12;
    let slope = (b1 * s22 - b2 * s12) / det;
    let quartic = (s11 * b2 - s12 * b1) / det;

    let (mut res2, mut y2) = (0.0, 0.0);
    for (x1, x2, y) in samples {
        let e = y - slope * x1 - quartic * x2;
        res2 += e * e;
        y2 += y * y;
    }
    let residual = (res2 / y2).sqrt();
    if !residual.is_finite() || residual > EFFECTIVE_RANGE_RESIDUAL {
        return Err(Error::FitQuality {
            residual,
            tolerance: EFFECTIVE_RANGE_RESIDUAL,
        });
    }
    Ok(EffectiveRangeFit {
        r_star: 1.0 / slope,
        quartic,
        residual,
    })
}

/// Depth at which the `branch`-th zero-energy `l`-wave bound state appears.
///
/// The interior phase `x = K₀R₀` solves `cos x = 0` (l = 0), `j₀(x) = 0`
/// (l = 1) or `j₁(x) = 0`, i.e. `tan x = x` (l = 2).
pub fn bound_state_threshold(l: u32, radius: f64, branch: u32) -> Result<f64> {
    check_l(l)?;
    if !(radius > 0.0) {
        return Err(Error::Domain {
            what: "radius must be > 0",
            value: radius,
        });
    }
    if branch == 0 {
        return Err(Error::Domain {
            what: "branch index starts at 1",
            value: 0.0,
        });
    }
    let b = branch as f64;
    let pi = std::f64::consts::PI;
    let x = match l {
        0 => (2.0 * b - 1.0) * pi / 2.0,
        1 => b * pi,
        _ => tan_equals_x_root(branch),
    };
    Ok(x * x / (2.0 * radius * radius))
}

/// The `b`-th positive root of `tan x = x`, which lies in `(bπ, bπ + π/2)`.
fn tan_equals_x_root(b: u32) -> f64 {
    // sin x − x cos x changes sign once on the interval.
    let f = |x: f64| x.sin() - x * x.cos();
    let pi = std::f64::consts::PI;
    let mut lo = b as f64 * pi;
    let mut hi = lo + 0.5 * pi - 1e-12;
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
