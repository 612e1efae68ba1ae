//! Two atoms in a harmonic trap with a zero-range interaction.
//!
//! The spectral equations equate a Gamma-ratio expression of the relative
//! energy `ℰ = E/ħω_z` with an inverse strength:
//!
//! * s-wave, isotropic trap: `d/a_s = 2 Γ(3/4 − ℰ/2) / Γ(1/4 − ℰ/2)`;
//! * p-wave, pancake trap `ω_⊥ = ω_z/n`, `m = 0`:
//!   `d_z³/a_p³ = −(8/n) Σ_k Γ((k+½)/n − ℰ/2 + ¾) / Γ((k+½)/n − ℰ/2 − ¾)`;
//! * p-wave, `m = ±1`:
//!   `d_z³/a_p³ = −(8/n²) Σ_{k,l} Γ((k+l+1)/n − ℰ/2 + ¼) / Γ((k+l+1)/n − ℰ/2 − 5/4)`.
//!
//! The right-hand sides diverge at the noninteracting levels of the trap.
//! Roots are searched interval by interval between those analytically known
//! poles, so the steep walls next to each pole are never straddled.

use crate::error::{Error, Result, Summand};
use crate::freescatter::{matching_fraction, SquareWellPotential};
use crate::roots::brent;
use crate::specialfn::{gamma_ratio, SignedLogValue};

/// Axially symmetric trap with `η = ω_⊥/ω_z = 1/n`; `n = 1` is isotropic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrapGeometry {
    pancake_index: u32,
}

impl TrapGeometry {
    pub fn pancake(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain {
                what: "pancake index n must be >= 1",
                value: 0.0,
            });
        }
        Ok(TrapGeometry { pancake_index: n })
    }

    pub fn isotropic() -> Self {
        TrapGeometry { pancake_index: 1 }
    }

    pub fn pancake_index(&self) -> u32 {
        self.pancake_index
    }

    pub fn eta(&self) -> f64 {
        1.0 / self.pancake_index as f64
    }

    pub fn is_isotropic(&self) -> bool {
        self.pancake_index == 1
    }
}

/// Partial wave and projection of angular momentum on the trap axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// s-wave (isotropic trap only).
    S,
    /// p-wave, `m = 0`.
    P0,
    /// p-wave, `m = ±1` (degenerate pair).
    P1,
}

impl Channel {
    pub fn l(self) -> u32 {
        match self {
            Channel::S => 0,
            Channel::P0 | Channel::P1 => 1,
        }
    }

    pub fn from_m(m: i32) -> Result<Self> {
        match m {
            0 => Ok(Channel::P0),
            1 | -1 => Ok(Channel::P1),
            _ => Err(Error::Domain {
                what: "p-wave projection m must be 0 or ±1",
                value: m as f64,
            }),
        }
    }
}

/// Interaction strength entering the spectral equation.
///
/// Fixed strengths are stored inverted so that the noninteracting limit is
/// `±∞` and unitarity is `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InteractionStrength {
    /// `d/a_s`.
    FixedS { inverse_length: f64 },
    /// `d_z³/a_p³`.
    FixedP { inverse_volume: f64 },
    /// Strength `a_l(k)^{2l+1}` of a square well at the trial energy.
    EnergyDependent(SquareWellPotential),
}

impl InteractionStrength {
    pub fn from_scattering_length(a_s: f64) -> Self {
        InteractionStrength::FixedS {
            inverse_length: 1.0 / a_s,
        }
    }

    pub fn from_scattering_volume(a_p3: f64) -> Self {
        InteractionStrength::FixedP {
            inverse_volume: 1.0 / a_p3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRoot {
    /// Number of poles (noninteracting levels) below the root.
    pub branch: usize,
    /// `ℰ` in units of `ħω_z`.
    pub energy: f64,
    /// Set for p-wave roots with `k |a_p(k)| ≥ 0.5`, outside the regime where
    /// an energy-independent strength is reliable.
    pub validity_warning: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumWarning {
    /// Fewer than `requested` roots were found in the window.
    WindowTooSmall { found: usize, requested: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub channel: Channel,
    /// Roots in increasing energy.
    pub roots: Vec<SpectrumRoot>,
    /// Noninteracting levels inside the window, increasing.
    pub poles: Vec<f64>,
    pub warnings: Vec<SpectrumWarning>,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.energy).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Final bracket width for each root, in `ħω_z`.
    pub tolerance: f64,
    /// Sign-change scan points per interval between poles.
    pub scan_points: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            scan_points: 400,
        }
    }
}

/// Threshold on `k|a_p|` above which roots carry a validity warning.
pub const VALIDITY_LIMIT: f64 = 0.5;

fn pole_error(energy: f64, summand: Summand) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::RatioPole { .. } => Error::SpectrumPole { energy, summand },
        other => other,
    }
}

/// `2 Γ(3/4 − ℰ/2) / Γ(1/4 − ℰ/2)`, the s-wave right-hand side.
pub fn busch_rhs(energy: f64) -> Result<SignedLogValue> {
    let half = 0.5 * energy;
    let r =
        gamma_ratio(0.75 - half, 0.25 - half).map_err(pole_error(energy, Summand::Single(0)))?;
    Ok(r.scale(2.0))
}

/// Pancake-trap p-wave right-hand side for `η = 1/n` and projection `m`.
pub fn pancake_rhs(energy: f64, n: u32, m: i32) -> Result<SignedLogValue> {
    if n == 0 {
        return Err(Error::Domain {
            what: "pancake index n must be >= 1",
            value: 0.0,
        });
    }
    let half = 0.5 * energy;
    let nf = n as f64;
    let n = n as usize;
    let mut sum = 0.0;
    match Channel::from_m(m)? {
        Channel::P0 => {
            for k in 0..n {
                let c = (k as f64 + 0.5) / nf;
                let r = gamma_ratio((c + 0.75) - half, (c - 0.75) - half)
                    .map_err(pole_error(energy, Summand::Single(k)))?;
                sum += r.value();
            }
            Ok(SignedLogValue::from_value(-8.0 / nf * sum))
        }
        _ => {
            // terms depend on k + l + 1 = s only; s occurs min(s, 2n − s) times
            for s in 1..2 * n {
                let c = s as f64 / nf;
                let k = s.saturating_sub(n);
                let pair = Summand::Pair(k, s - 1 - k);
                let r = gamma_ratio((c + 0.25) - half, (c - 1.25) - half)
                    .map_err(pole_error(energy, pair))?;
                sum += s.min(2 * n - s) as f64 * r.value();
            }
            Ok(SignedLogValue::from_value(-8.0 / (nf * nf) * sum))
        }
    }
}

/// Right-hand side for a geometry and channel.
pub fn spectral_rhs(
    geometry: &TrapGeometry,
    channel: Channel,
    energy: f64,
) -> Result<SignedLogValue> {
    match channel {
        Channel::S => {
            require_isotropic_s(geometry)?;
            busch_rhs(energy)
        }
        Channel::P0 => pancake_rhs(energy, geometry.pancake_index, 0),
        Channel::P1 => pancake_rhs(energy, geometry.pancake_index, 1),
    }
}

fn require_isotropic_s(geometry: &TrapGeometry) -> Result<()> {
    if geometry.is_isotropic() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "the s-wave spectrum is only available for the isotropic trap (n = 1)".into(),
        ))
    }
}

/// All poles of the right-hand side up to `upper`, increasing and deduplicated.
///
/// These are the noninteracting levels of the channel:
/// s: `3/2 + 2j`; m = 0: `3/2 + (2k+1)/n + 2j`; m = ±1: `1/2 + 2s/n + 2j`, `1 ≤ s ≤ 2n−1`.
pub fn pole_energies(geometry: &TrapGeometry, channel: Channel, upper: f64) -> Vec<f64> {
    let n = geometry.pancake_index as usize;
    let nf = n as f64;
    let offsets: Vec<f64> = match channel {
        Channel::S => vec![1.5],
        Channel::P0 => (0..n).map(|k| 1.5 + (2 * k + 1) as f64 / nf).collect(),
        Channel::P1 => (1..2 * n).map(|s| 0.5 + 2.0 * s as f64 / nf).collect(),
    };
    let mut poles = Vec::new();
    for off in offsets {
        let mut j = 0.0;
        while off + 2.0 * j <= upper {
            poles.push(off + 2.0 * j);
            j += 1.0;
        }
    }
    poles.sort_by(f64::total_cmp);
    poles.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    poles
}

fn pole_gap(pole: f64) -> f64 {
    1e-10 * pole.abs().max(1.0)
}

fn validate_window(window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidWindow { lo, hi });
    }
    Ok(())
}

/// Geometric clustering toward pole ends, uniform elsewhere.
fn scan_points(a: f64, b: f64, a_pole: bool, b_pole: bool, count: usize) -> Vec<f64> {
    let count = count.max(8);
    let len = b - a;
    let mut pts = Vec::with_capacity(count + 2);
    let uniform = if a_pole || b_pole { count / 2 } else { count };
    for i in 0..=uniform {
        pts.push(a + len * i as f64 / uniform as f64);
    }
    let cluster = (count - uniform) / if a_pole && b_pole { 2 } else { 1 };
    let add_cluster = |pts: &mut Vec<f64>, pole: f64, dir: f64| {
        let near = pole_gap(pole);
        let far = 0.25 * len;
        if far <= near {
            return;
        }
        let ratio = (far / near).powf(1.0 / cluster.max(1) as f64);
        let mut d = near;
        for _ in 0..=cluster {
            pts.push(pole + dir * d);
            d *= ratio;
        }
    };
    if a_pole {
        add_cluster(&mut pts, a, 1.0);
    }
    if b_pole {
        add_cluster(&mut pts, b, -1.0);
    }
    let lo = if a_pole { a + pole_gap(a) } else { a };
    let hi = if b_pole { b - pole_gap(b) } else { b };
    pts.retain(|&x| x >= lo && x <= hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// The function whose zeros are the spectrum, plus the term that dominates
/// next to a pole (its sign is the sign of the divergence).
trait SpectralEquation {
    fn eval(&self, energy: f64) -> Result<(f64, f64)>;
}

struct FixedEquation {
    geometry: TrapGeometry,
    channel: Channel,
    inverse: f64,
}

impl SpectralEquation for FixedEquation {
    fn eval(&self, energy: f64) -> Result<(f64, f64)> {
        let rhs = spectral_rhs(&self.geometry, self.channel, energy)?.value();
        Ok((rhs - self.inverse, rhs))
    }
}

/// `R^{2l+1} N · rhs + D`: the spectral equation multiplied through by the
/// numerator of the energy-dependent strength, continuous between poles.
struct EdpEquation {
    geometry: TrapGeometry,
    channel: Channel,
    well: SquareWellPotential,
}

impl SpectralEquation for EdpEquation {
    fn eval(&self, energy: f64) -> Result<(f64, f64)> {
        let l = self.channel.l();
        let rhs = spectral_rhs(&self.geometry, self.channel, energy)?.value();
        let m = matching_fraction(&self.well, l, 2.0 * energy)?;
        let scale = self.well.radius().powi(2 * l as i32 + 1);
        let dominant = scale * m.numerator * rhs;
        Ok((dominant + m.denominator, dominant))
    }
}

fn find_roots<E: SpectralEquation>(
    eq: &E,
    all_poles: &[f64],
    window: (f64, f64),
    options: &SolverOptions,
    noninteracting: bool,
) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    for &p in all_poles {
        for edge in [lo, hi] {
            if (edge - p).abs() < pole_gap(p) {
                return Err(Error::WindowEdgeAtPole { edge, pole: p });
            }
        }
    }
    let inside: Vec<f64> = all_poles
        .iter()
        .copied()
        .filter(|&p| p > lo && p < hi)
        .collect();
    if noninteracting {
        return Ok(inside);
    }

    let mut bounds = vec![(lo, false)];
    bounds.extend(inside.iter().map(|&p| (p, true)));
    bounds.push((hi, false));

    let g = |x: f64| eq.eval(x).map(|(v, _)| v);
    let mut roots = Vec::new();
    for w in bounds.windows(2) {
        let ((a, a_pole), (b, b_pole)) = (w[0], w[1]);
        let pts = scan_points(a, b, a_pole, b_pole, options.scan_points);
        let mut vals = Vec::with_capacity(pts.len());
        for &x in &pts {
            vals.push(eq.eval(x)?);
        }
        // roots squeezed between a pole and the first scan point
        if a_pole {
            let (v, dom) = vals[0];
            if dom != 0.0 && v.signum() != dom.signum() {
                roots.push(0.5 * (a + pts[0]));
            }
        }
        for i in 0..pts.len() - 1 {
            let (v0, _) = vals[i];
            let (v1, _) = vals[i + 1];
            if v0 == 0.0 {
                roots.push(pts[i]);
            } else if v1 != 0.0 && v0.signum() != v1.signum() {
                let r = brent(g, pts[i], pts[i + 1], options.tolerance).map_err(|e| match e {
                    Error::NoConvergence { .. } => Error::NoConvergence {
                        lo: pts[i],
                        hi: pts[i + 1],
                        resolution: options.scan_points,
                    },
                    other => other,
                })?;
                roots.push(r);
            }
        }
        let last = pts.len() - 1;
        if vals[last].0 == 0.0 {
            roots.push(pts[last]);
        }
        if b_pole {
            let (v, dom) = vals[last];
            if dom != 0.0 && v != 0.0 && v.signum() != dom.signum() {
                roots.push(0.5 * (b + pts[last]));
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= options.tolerance);
    Ok(roots)
}

fn assemble(
    geometry: &TrapGeometry,
    channel: Channel,
    window: (f64, f64),
    max_roots: usize,
    energies: Vec<f64>,
    all_poles: &[f64],
    strength_at: impl Fn(f64) -> Option<f64>,
) -> SpectrumResult {
    let _ = geometry;
    let mut roots: Vec<SpectrumRoot> = energies
        .into_iter()
        .map(|e| {
            let branch = all_poles
                .iter()
                .filter(|&&p| p < e - pole_gap(p) / 4.0)
                .count();
            let validity_warning = channel.l() == 1
                && strength_at(e).is_some_and(|a3| {
                    let k = (2.0 * e.abs()).sqrt();
                    k * a3.cbrt().abs() >= VALIDITY_LIMIT
                });
            SpectrumRoot {
                branch,
                energy: e,
                validity_warning,
            }
        })
        .collect();
    roots.truncate(max_roots);
    let mut warnings = Vec::new();
    if roots.len() < max_roots {
        warnings.push(SpectrumWarning::WindowTooSmall {
            found: roots.len(),
            requested: max_roots,
        });
    }
    let poles = all_poles
        .iter()
        .copied()
        .filter(|&p| p > window.0 && p < window.1)
        .collect();
    SpectrumResult {
        channel,
        roots,
        poles,
        warnings,
    }
}

/// Roots of `rhs(ℰ) = inverse strength` inside `window`, lowest first.
pub fn solve_spectrum(
    geometry: &TrapGeometry,
    strength: &InteractionStrength,
    channel: Channel,
    window: (f64, f64),
    max_roots: usize,
) -> Result<SpectrumResult> {
    solve_spectrum_with(
        geometry,
        strength,
        channel,
        window,
        max_roots,
        &SolverOptions::default(),
    )
}

pub fn solve_spectrum_with(
    geometry: &TrapGeometry,
    strength: &InteractionStrength,
    channel: Channel,
    window: (f64, f64),
    max_roots: usize,
    options: &SolverOptions,
) -> Result<SpectrumResult> {
    validate_window(window)?;
    let inverse = match (strength, channel) {
        (InteractionStrength::FixedS { inverse_length }, Channel::S) => *inverse_length,
        (InteractionStrength::FixedP { inverse_volume }, Channel::P0 | Channel::P1) => {
            *inverse_volume
        }
        (InteractionStrength::EnergyDependent(well), _) => {
            return solve_spectrum_edp_with(geometry, well, channel, window, max_roots, options)
        }
        _ => {
            return Err(Error::Unsupported(
                "strength kind does not match the channel's partial wave".into(),
            ))
        }
    };
    if channel == Channel::S {
        require_isotropic_s(geometry)?;
    }
    if inverse.is_nan() {
        return Err(Error::Domain {
            what: "inverse strength is NaN",
            value: inverse,
        });
    }
    let all_poles = pole_energies(geometry, channel, window.1 + 1.0);
    let eq = FixedEquation {
        geometry: *geometry,
        channel,
        inverse,
    };
    let energies = find_roots(&eq, &all_poles, window, options, inverse.is_infinite())?;
    Ok(assemble(
        geometry,
        channel,
        window,
        max_roots,
        energies,
        &all_poles,
        |_| Some(1.0 / inverse),
    ))
}

/// Self-consistent spectrum with the energy-dependent strength of `well`.
///
/// Solves `rhs(ℰ) = 1/a_l(k)^{2l+1}` with `k² = 2ℰ` as one equation in `ℰ`.
pub fn solve_spectrum_edp(
    geometry: &TrapGeometry,
    well: &SquareWellPotential,
    channel: Channel,
    window: (f64, f64),
    max_roots: usize,
) -> Result<SpectrumResult> {
    solve_spectrum_edp_with(
        geometry,
        well,
        channel,
        window,
        max_roots,
        &SolverOptions::default(),
    )
}

pub fn solve_spectrum_edp_with(
    geometry: &TrapGeometry,
    well: &SquareWellPotential,
    channel: Channel,
    window: (f64, f64),
    max_roots: usize,
    options: &SolverOptions,
) -> Result<SpectrumResult> {
    validate_window(window)?;
    if channel == Channel::S {
        require_isotropic_s(geometry)?;
    }
    // no spectrum below the bottom of the well
    let window = (window.0.max(-well.depth()), window.1);
    validate_window(window)?;
    let all_poles = pole_energies(geometry, channel, window.1 + 1.0);
    let eq = EdpEquation {
        geometry: *geometry,
        channel,
        well: *well,
    };
    let energies = find_roots(&eq, &all_poles, window, options, well.depth() == 0.0)?;
    Ok(assemble(
        geometry,
        channel,
        window,
        max_roots,
        energies,
        &all_poles,
        |e| crate::freescatter::energy_dependent_strength(well, 1, e).ok(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso() -> TrapGeometry {
        TrapGeometry::isotropic()
    }

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn busch_examples() {
        assert!(busch_rhs(0.5).unwrap().is_zero());
        assert!(busch_rhs(2.5).unwrap().is_zero());
        let v = busch_rhs(-10.0).unwrap().value();
        assert!((v - 4.474_914_774_744_061).abs() < 1e-12);
        assert!(matches!(busch_rhs(1.5), Err(Error::SpectrumPole { .. })));
        assert!(matches!(busch_rhs(5.5), Err(Error::SpectrumPole { .. })));
    }

    #[test]
    fn pancake_examples() {
        assert!(pancake_rhs(-0.5, 1, 0).unwrap().is_zero());
        assert!(matches!(
            pancake_rhs(1.6, 10, 0),
            Err(Error::SpectrumPole {
                summand: Summand::Single(0),
                ..
            })
        ));
        assert!(matches!(
            pancake_rhs(0.7, 10, 1),
            Err(Error::SpectrumPole {
                summand: Summand::Pair(0, 0),
                ..
            })
        ));
        assert!(pancake_rhs(1.0, 10, 2).is_err());
        assert!(pancake_rhs(1.0, 0, 0).is_err());
    }

    #[test]
    fn isotropic_channels_coincide() {
        for i in 0..200 {
            let e = -7.3 + 0.0731 * i as f64;
            let (Ok(a), Ok(b)) = (pancake_rhs(e, 1, 0), pancake_rhs(e, 1, -1)) else {
                continue;
            };
            let (a, b) = (a.value(), b.value());
            assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(1e-300),
                "E={e}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn pole_sets_match_noninteracting_levels() {
        for n in [1u32, 2, 5, 10] {
            let g = TrapGeometry::pancake(n).unwrap();
            let nf = n as f64;
            for (channel, m) in [(Channel::P0, 0), (Channel::P1, 1)] {
                let mut want = Vec::new();
                for j in 0..8 {
                    for k in 0..n {
                        if m == 0 {
                            want.push(1.5 + (2 * k + 1) as f64 / nf + 2.0 * j as f64);
                        } else {
                            for l in 0..n {
                                want.push(0.5 + 2.0 * (k + l + 1) as f64 / nf + 2.0 * j as f64);
                            }
                        }
                    }
                }
                want.retain(|&e| e <= 12.0);
                want.sort_by(f64::total_cmp);
                want.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
                let got = pole_energies(&g, channel, 12.0);
                assert_close(&got, &want, 1e-12);
                // the right-hand side diverges there and is finite just beside
                for &p in &got {
                    assert!(pancake_rhs(p, n, m).is_err(), "n={n} m={m} pole {p}");
                    let beside = pancake_rhs(p + 1e-7, n, m).unwrap().value();
                    assert!(beside.abs() > 1e3, "n={n} m={m} pole {p}: {beside}");
                }
            }
        }
    }

    #[test]
    fn anisotropic_lowest_poles() {
        let g = TrapGeometry::pancake(10).unwrap();
        assert!((pole_energies(&g, Channel::P1, 5.0)[0] - 0.7).abs() < 1e-12);
        assert!((pole_energies(&g, Channel::P0, 5.0)[0] - 1.6).abs() < 1e-12);
    }

    #[test]
    fn p_wave_limits() {
        let fixed = |inv: f64, w: (f64, f64)| {
            solve_spectrum(
                &iso(),
                &InteractionStrength::FixedP {
                    inverse_volume: inv,
                },
                Channel::P0,
                w,
                10,
            )
            .unwrap()
            .energies()
        };
        assert_close(
            &fixed(f64::INFINITY, (0.0, 9.0)),
            &[2.5, 4.5, 6.5, 8.5],
            0.0,
        );
        assert_close(&fixed(0.0, (-3.0, 8.0)), &[-0.5, 1.5, 3.5, 5.5, 7.5], 1e-9);
        // huge finite inverse: roots sit next to the poles
        assert_close(&fixed(1e9, (2.0, 10.0)), &[2.5, 4.5, 6.5, 8.5], 1e-6);
    }

    #[test]
    fn s_wave_limits() {
        let fixed = |inv: f64, w: (f64, f64)| {
            solve_spectrum(
                &iso(),
                &InteractionStrength::FixedS {
                    inverse_length: inv,
                },
                Channel::S,
                w,
                10,
            )
            .unwrap()
            .energies()
        };
        assert_close(&fixed(0.0, (0.0, 5.0)), &[0.5, 2.5, 4.5], 1e-9);
        assert_close(&fixed(f64::INFINITY, (0.0, 5.0)), &[1.5, 3.5], 0.0);
        // a_s → 0⁻ approaches the poles from below
        let r = fixed(-1e11, (0.0, 5.0));
        assert_close(&r, &[1.5, 3.5], 1e-9);
        assert!(r.iter().all(|&e| e < 1.5 || (e < 3.5 && e > 2.0)));
    }

    #[test]
    fn s_wave_rejects_anisotropic_trap() {
        let g = TrapGeometry::pancake(2).unwrap();
        let s = InteractionStrength::FixedS {
            inverse_length: 0.0,
        };
        assert!(matches!(
            solve_spectrum(&g, &s, Channel::S, (0.0, 3.0), 3),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn degeneracy_lifted_by_anisotropy() {
        let g = TrapGeometry::pancake(10).unwrap();
        let s = InteractionStrength::FixedP {
            inverse_volume: 0.0,
        };
        let m0 = solve_spectrum(&g, &s, Channel::P0, (-4.0, 3.95), 2).unwrap();
        let m1 = solve_spectrum(&g, &s, Channel::P1, (-4.0, 3.95), 2).unwrap();
        // mpmath, 30 digits
        assert_close(
            &m0.energies(),
            &[-0.387_292_250_116_806_65, 1.122_430_957_848_746_9],
            1e-10,
        );
        assert_close(
            &m1.energies(),
            &[-0.224_360_524_525_896_52, 0.574_642_863_956_801_97],
            1e-10,
        );
    }

    #[test]
    fn window_checks() {
        let s = InteractionStrength::FixedP {
            inverse_volume: 1.0,
        };
        assert!(matches!(
            solve_spectrum(&iso(), &s, Channel::P0, (2.5, 6.0), 3),
            Err(Error::WindowEdgeAtPole { .. })
        ));
        assert!(matches!(
            solve_spectrum(&iso(), &s, Channel::P0, (3.0, 3.0), 3),
            Err(Error::InvalidWindow { .. })
        ));
        let r = solve_spectrum(&iso(), &s, Channel::P0, (2.6, 4.0), 5).unwrap();
        assert_eq!(
            r.warnings,
            vec![SpectrumWarning::WindowTooSmall {
                found: r.roots.len(),
                requested: 5
            }]
        );
    }

    #[test]
    fn branch_indices_count_poles_below() {
        let s = InteractionStrength::FixedP {
            inverse_volume: 0.0,
        };
        let r = solve_spectrum(&iso(), &s, Channel::P0, (-3.0, 8.0), 10).unwrap();
        let branches: Vec<usize> = r.roots.iter().map(|x| x.branch).collect();
        assert_eq!(branches, vec![0, 0, 1, 2, 3]);
        assert_close(&r.poles, &[2.5, 4.5, 6.5], 0.0);
    }

    #[test]
    fn interlacing_and_monotonicity_on_finite_branches() {
        for n in [1u32, 2, 5, 10] {
            let g = TrapGeometry::pancake(n).unwrap();
            for channel in [Channel::P0, Channel::P1] {
                let poles = pole_energies(&g, channel, 6.0);
                let mut previous: Option<Vec<f64>> = None;
                for inv in [-300.0, -20.0, -1.0, 0.0, 0.5, 7.0, 150.0] {
                    let s = InteractionStrength::FixedP {
                        inverse_volume: inv,
                    };
                    let w = (poles[0] + 1e-6, poles[poles.len() - 1] - 1e-6);
                    let r = solve_spectrum(&g, &s, channel, w, 1000).unwrap();
                    let e = r.energies();
                    for pair in poles.windows(2) {
                        let inside = e.iter().filter(|&&x| x > pair[0] && x < pair[1]).count();
                        assert_eq!(
                            inside, 1,
                            "n={n} {channel:?} inv={inv} branch {pair:?}: {e:?}"
                        );
                    }
                    // larger inverse strength moves each root down
                    if let Some(prev) = &previous {
                        for (a, b) in prev.iter().zip(&e) {
                            assert!(b < a, "n={n} {channel:?} inv={inv}");
                        }
                    }
                    previous = Some(e);
                }
            }
        }
    }

    #[test]
    fn validity_flag_set_for_large_volumes() {
        let s = InteractionStrength::from_scattering_volume(1e-3);
        let r = solve_spectrum(&iso(), &s, Channel::P0, (2.6, 7.0), 3).unwrap();
        assert!(r.roots.iter().all(|x| !x.validity_warning));
        let s = InteractionStrength::from_scattering_volume(2.0);
        let r = solve_spectrum(&iso(), &s, Channel::P0, (2.6, 7.0), 3).unwrap();
        assert!(r.roots.iter().all(|x| x.validity_warning));
    }

    #[test]
    fn edp_without_well_is_noninteracting() {
        let w = SquareWellPotential::new(0.0, 0.05).unwrap();
        let r = solve_spectrum_edp(&iso(), &w, Channel::P0, (0.0, 10.0), 4).unwrap();
        assert_close(&r.energies(), &[2.5, 4.5, 6.5, 8.5], 0.0);
    }

    #[test]
    fn edp_close_to_fixed_far_from_resonance() {
        let w = SquareWellPotential::new(500.0, 0.05).unwrap();
        let a3 = crate::freescatter::scattering_volume_p(&w).unwrap();
        let fixed = solve_spectrum(
            &iso(),
            &InteractionStrength::from_scattering_volume(a3),
            Channel::P0,
            (0.0, 7.0),
            5,
        )
        .unwrap();
        let edp = solve_spectrum_edp(&iso(), &w, Channel::P0, (0.0, 7.0), 5).unwrap();
        assert_close(&edp.energies(), &fixed.energies(), 1e-3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn finite_branches_hold_one_root_and_descend(
                n in prop::sample::select(vec![1u32, 2, 5, 10]),
                m in prop::sample::select(vec![0i32, 1]),
                u in -200.0f64..200.0,
                du in 0.01f64..50.0,
            ) {
                let g = TrapGeometry::pancake(n).unwrap();
                let channel = Channel::from_m(m).unwrap();
                let poles = pole_energies(&g, channel, 5.0);
                let w = (poles[0] + 1e-6, poles[poles.len() - 1] - 1e-6);
                let solve = |inv: f64| {
                    let s = InteractionStrength::FixedP { inverse_volume: inv };
                    solve_spectrum(&g, &s, channel, w, 1000).unwrap().energies()
                };
                let (lo, hi) = (solve(u), solve(u + du));
                for pair in poles.windows(2) {
                    let inside = lo.iter().filter(|&&x| x > pair[0] && x < pair[1]).count();
                    prop_assert_eq!(inside, 1);
                }
                prop_assert_eq!(lo.len(), hi.len());
                for (a, b) in lo.iter().zip(&hi) {
                    prop_assert!(b < a);
                }
            }

            #[test]
            fn isotropic_channels_coincide(e in -6.0f64..8.0) {
                let g = TrapGeometry::isotropic();
                let near_pole = pole_energies(&g, Channel::P0, 9.0)
                    .iter()
                    .any(|p| (p - e).abs() < 1e-6);
                prop_assume!(!near_pole);
                let a = spectral_rhs(&g, Channel::P0, e).unwrap().value();
                let b = spectral_rhs(&g, Channel::P1, e).unwrap().value();
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
            }
        }
    }
}
