//! Exact levels of a square well inside an isotropic harmonic trap.
//!
//! Solves `u'' = [l(l+1)/r² + r² − 2E − 2U·[r < R₀]] u` by Numerov
//! integration: outward from the origin, inward from `r_max`, matched at
//! `match_radius` through the Wronskian. Eigenvalues are isolated by counting
//! nodes of the outward solution and then refined.

use crate::error::{Error, Result};
use crate::freescatter::SquareWellPotential;
use crate::roots::{bisect, brent};

/// Integration grid and matching point, in units of `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub r_max: f64,
    /// Grid spacing; `None` picks `min(1/200, R₀/50)`. The spacing is always
    /// shrunk so that `R₀` falls on a grid node.
    pub step: Option<f64>,
    pub match_radius: f64,
    /// Eigenvalue refinement tolerance in `ħω`.
    pub tolerance: f64,
    /// Step halvings allowed before giving up on grid convergence.
    pub max_refinements: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            r_max: 10.0,
            step: None,
            match_radius: 1.5,
            tolerance: 1e-10,
            max_refinements: 4,
        }
    }
}

/// Largest eigenvalue shift tolerated when the step is halved.
pub const GRID_SHIFT_LIMIT: f64 = 1e-6;

impl OracleConfig {
    pub fn validate(&self, well: &SquareWellPotential) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.r_max.is_finite() && self.match_radius > 0.0 && self.match_radius < self.r_max) {
            return bad("need 0 < match_radius < r_max");
        }
        if let Some(s) = self.step {
            if !(s > 0.0 && s < self.match_radius) {
                return bad("need 0 < step < match_radius");
            }
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if well.radius() >= self.match_radius {
            return bad("well radius must lie inside the matching radius");
        }
        Ok(())
    }

    fn base_step(&self, well: &SquareWellPotential) -> f64 {
        self.step
            .unwrap_or_else(|| (1.0 / 200.0f64).min(well.radius() / 50.0))
    }
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    h: f64,
    well: usize,
    matching: usize,
    end: usize,
}

impl Grid {
    fn new(well: &SquareWellPotential, config: &OracleConfig, step: f64) -> Result<Self> {
        let r0 = well.radius();
        let n_well = (r0 / step).ceil().max(2.0) as usize;
        let h = r0 / n_well as f64;
        let matching = (config.match_radius / h).round() as usize;
        let end = (config.r_max / h).round() as usize;
        if matching <= n_well + 1 || end <= matching + 2 {
            return Err(Error::InvalidConfig("grid too coarse for the radii".into()));
        }
        Ok(Grid {
            h,
            well: n_well,
            matching,
            end,
        })
    }

    fn r(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
}

struct Radial {
    centrifugal: f64,
    l: u32,
    energy: f64,
    depth: f64,
}

const RESCALE: f64 = 1e150;

impl Radial {
    fn f(&self, r: f64, inside: bool) -> f64 {
        let v = if inside { 2.0 * self.depth } else { 0.0 };
        self.centrifugal / (r * r) + r * r - 2.0 * self.energy - v
    }

    /// Regular series `r^{l+1} Σ a_{2j} r^{2j}` of the interior solution.
    fn origin_series(&self, r: f64) -> f64 {
        let q = 2.0 * (self.energy + self.depth);
        let l = self.l as f64;
        let r2 = r * r;
        // a_{2j} = (−q a_{2j−2} + a_{2j−4}) / (2j (2l + 2j + 1))
        let (mut prev2, mut prev) = (0.0, 1.0);
        let mut sum = 1.0;
        let mut pow = 1.0;
        for j in 1..60 {
            let jf = j as f64;
            let next = (-q * prev + prev2) / (2.0 * jf * (2.0 * l + 2.0 * jf + 1.0));
            prev2 = prev;
            prev = next;
            pow *= r2;
            let term = next * pow;
            sum += term;
            if j > 2 && term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        r.powi(self.l as i32 + 1) * sum
    }

    /// Outward pass. Visits `(index, u)` for every node from 1 up to `last`;
    /// values carry an unknown positive scale that may change during the pass.
    fn outward(&self, g: &Grid, last: usize, mut visit: impl FnMut(usize, f64, f64)) {
        let h2 = g.h * g.h / 12.0;
        let step = |f0: f64, f1: f64, f2: f64, u0: f64, u1: f64| {
            (2.0 * u1 * (1.0 + 5.0 * h2 * f1) - u0 * (1.0 - h2 * f0)) / (1.0 - h2 * f2)
        };
        let fin = |i: usize| self.f(g.r(i), true);
        let fout = |i: usize| self.f(g.r(i), false);

        let mut u0 = self.origin_series(g.r(1));
        let mut u1 = self.origin_series(g.r(2));
        visit(1, u0, 1.0);
        visit(2, u1, 1.0);
        let mut scale = 1.0;
        for i in 2..g.well {
            let u2 = step(fin(i - 1), fin(i), fin(i + 1), u0, u1);
            u0 = u1;
            u1 = u2;
            visit(i + 1, u1, scale);
        }
        // continue the interior solution one node past R₀ for a centered slope
        let w = g.well;
        let ghost = step(fin(w - 1), fin(w), fin(w + 1), u0, u1);
        let slope = (ghost * (1.0 - 2.0 * h2 * fin(w + 1)) - u0 * (1.0 - 2.0 * h2 * fin(w - 1)))
            / (2.0 * g.h);
        let u_well = u1;

        // restart outside with a Taylor step of the exterior equation
        let r = g.r(w);
        let ll = self.centrifugal;
        let f = fout(w);
        let f1 = -2.0 * ll / r.powi(3) + 2.0 * r;
        let f2 = 6.0 * ll / r.powi(4) + 2.0;
        let f3 = -24.0 * ll / r.powi(5);
        let d2 = f * u_well;
        let d3 = f1 * u_well + f * slope;
        let d4 = f2 * u_well + 2.0 * f1 * slope + f * d2;
        let d5 = f3 * u_well + 3.0 * f2 * slope + 3.0 * f1 * d2 + f * d3;
        let hh = g.h;
        let next = u_well
            + hh * (slope + hh / 2.0 * (d2 + hh / 3.0 * (d3 + hh / 4.0 * (d4 + hh / 5.0 * d5))));
        u0 = u_well;
        u1 = next;
        visit(w + 1, u1, scale);
        for i in w + 1..last {
            let u2 = step(fout(i - 1), fout(i), fout(i + 1), u0, u1);
            u0 = u1;
            u1 = u2;
            if u1.abs() > RESCALE {
                u0 /= RESCALE;
                u1 /= RESCALE;
                scale *= RESCALE;
            }
            visit(i + 1, u1, scale);
        }
    }

    /// Inward pass from the oscillator tail `r^{E−1/2} e^{−r²/2}`; returns
    /// the solution at `matching − 1, matching, matching + 1`.
    fn inward(&self, g: &Grid) -> [f64; 3] {
        let h2 = g.h * g.h / 12.0;
        let f = |i: usize| self.f(g.r(i), false);
        let phase = |i: usize| {
            let r = g.r(i);
            (self.energy - 0.5) * r.ln() - 0.5 * r * r
        };
        let mut u_hi = 1.0;
        let mut u_lo = (phase(g.end - 1) - phase(g.end)).exp();
        let mut out = [0.0; 3];
        let mut i = g.end - 1;
        while i > g.matching - 1 {
            let u_next = (2.0 * u_lo * (1.0 + 5.0 * h2 * f(i)) - u_hi * (1.0 - h2 * f(i + 1)))
                / (1.0 - h2 * f(i - 1));
            u_hi = u_lo;
            u_lo = u_next;
            i -= 1;
            if u_lo.abs() > RESCALE {
                u_lo /= RESCALE;
                u_hi /= RESCALE;
            }
            if i == g.matching {
                out[2] = u_hi;
            }
        }
        out[1] = u_hi;
        out[0] = u_lo;
        out
    }
}

fn radial(well: &SquareWellPotential, l: u32, energy: f64) -> Radial {
    Radial {
        centrifugal: (l * (l + 1)) as f64,
        l,
        energy,
        depth: well.depth(),
    }
}

/// Nodes of the outward solution on `(0, r_max)`.
fn node_count(well: &SquareWellPotential, l: u32, energy: f64, g: &Grid) -> usize {
    let mut nodes = 0;
    let mut prev = 0.0f64;
    radial(well, l, energy).outward(g, g.end, |_, u, _| {
        if u != 0.0 {
            if prev != 0.0 && u.signum() != prev.signum() {
                nodes += 1;
            }
            prev = u;
        }
    });
    nodes
}

/// Wronskian `u_out' u_in − u_out u_in'` at the matching node.
fn mismatch(well: &SquareWellPotential, l: u32, energy: f64, g: &Grid) -> f64 {
    let rad = radial(well, l, energy);
    let m = g.matching;
    let mut out = [0.0; 3];
    let mut scale_at = [1.0; 3];
    rad.outward(g, m + 1, |i, u, s| {
        if i + 1 >= m && i <= m + 1 {
            out[i + 1 - m] = u;
            scale_at[i + 1 - m] = s;
        }
    });
    // bring the three outward values to a common scale
    for k in 0..3 {
        out[k] *= scale_at[k] / scale_at[2];
    }
    let inw = rad.inward(g);
    let h2 = g.h * g.h / 12.0;
    let f = |i: usize| rad.f(g.r(i), false);
    let deriv = |v: &[f64; 3]| {
        (v[2] * (1.0 - 2.0 * h2 * f(m + 1)) - v[0] * (1.0 - 2.0 * h2 * f(m - 1))) / (2.0 * g.h)
    };
    let (dout, din) = (deriv(&out), deriv(&inw));
    // normalise so neither solution's arbitrary size dominates the result
    let nout = out[1].abs().max(dout.abs() * g.h).max(f64::MIN_POSITIVE);
    let nin = inw[1].abs().max(din.abs() * g.h).max(f64::MIN_POSITIVE);
    (dout * inw[1] - out[1] * din) / (nout * nin)
}

/// Eigenvalues in `window` on a single grid, without convergence checks.
pub fn oracle_levels_on_grid(
    well: &SquareWellPotential,
    l: u32,
    window: (f64, f64),
    config: &OracleConfig,
    step: f64,
) -> Result<Vec<f64>> {
    check_inputs(well, l, window, config)?;
    let g = Grid::new(well, config, step)?;
    // nothing below the bottom of the well
    let lo = window.0.max(-well.depth());
    let hi = window.1;
    if lo >= hi {
        return Ok(Vec::new());
    }
    let count = |e: f64| node_count(well, l, e, &g);
    let (n_lo, n_hi) = (count(lo), count(hi));
    let mut levels = Vec::with_capacity(n_hi.saturating_sub(n_lo));
    for j in n_lo..n_hi {
        // isolate exactly one level in (a, b)
        let (mut a, mut b) = (lo, hi);
        let (mut na, mut nb) = (n_lo, n_hi);
        while !(na == j && nb == j + 1) {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                return Err(Error::NoConvergence {
                    lo: a,
                    hi: b,
                    resolution: g.end,
                });
            }
            let nm = count(mid);
            if nm <= j {
                a = mid;
                na = nm;
            } else {
                b = mid;
                nb = nm;
            }
        }
        let w = |e: f64| Ok(mismatch(well, l, e, &g));
        let level = match brent(w, a, b, config.tolerance) {
            Ok(e) => e,
            // no sign change in the Wronskian: fall back to the node count
            Err(Error::NoConvergence { .. }) => bisect(
                |e| Ok(if count(e) > j { 1.0 } else { -1.0 }),
                a,
                b,
                config.tolerance,
            )?,
            Err(e) => return Err(e),
        };
        levels.push(level);
    }
    Ok(levels)
}

fn check_inputs(
    well: &SquareWellPotential,
    l: u32,
    window: (f64, f64),
    config: &OracleConfig,
) -> Result<()> {
    if l > 1 {
        return Err(Error::Unsupported(
            "the trap oracle supports l = 0 and l = 1".into(),
        ));
    }
    let (lo, hi) = window;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidWindow { lo, hi });
    }
    config.validate(well)
}

/// All eigenvalues of the trapped square well inside `window`, increasing.
///
/// The step is halved until no level moves by more than `GRID_SHIFT_LIMIT`;
/// the finer grid's levels are returned.
pub fn oracle_levels(
    well: &SquareWellPotential,
    l: u32,
    window: (f64, f64),
    config: &OracleConfig,
) -> Result<Vec<f64>> {
    check_inputs(well, l, window, config)?;
    // pad so that levels near an edge are paired across grids
    let pad = 0.05;
    let padded = (window.0 - pad, window.1 + pad);
    let mut step = config.base_step(well);
    let mut coarse = oracle_levels_on_grid(well, l, padded, config, step)?;
    let mut shift = f64::INFINITY;
    for _ in 0..=config.max_refinements {
        let fine = oracle_levels_on_grid(well, l, padded, config, step / 2.0)?;
        shift = if fine.len() == coarse.len() {
            fine.iter()
                .zip(&coarse)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        if shift <= GRID_SHIFT_LIMIT {
            return Ok(fine
                .into_iter()
                .filter(|&e| e > window.0 && e < window.1)
                .collect());
        }
        step /= 2.0;
        coarse = fine;
    }
    Err(Error::GridResolution { step, shift })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn well(depth: f64, radius: f64) -> SquareWellPotential {
        SquareWellPotential::new(depth, radius).unwrap()
    }

    #[test]
    fn oscillator_levels_without_well() {
        let cfg = OracleConfig::default();
        let s = oracle_levels(&well(0.0, 0.05), 0, (0.0, 8.0), &cfg).unwrap();
        let p = oracle_levels(&well(0.0, 0.05), 1, (0.0, 9.0), &cfg).unwrap();
        for (got, want) in s.iter().zip([1.5, 3.5, 5.5, 7.5]) {
            assert!((got - want).abs() < 1e-6, "{s:?}");
        }
        for (got, want) in p.iter().zip([2.5, 4.5, 6.5, 8.5]) {
            assert!((got - want).abs() < 1e-6, "{p:?}");
        }
        assert_eq!((s.len(), p.len()), (4, 4));
    }

    #[test]
    fn origin_series_solves_interior_equation() {
        let rad = Radial {
            centrifugal: 2.0,
            l: 1,
            energy: 1.3,
            depth: 700.0,
        };
        let h = 1e-4;
        for &r in &[0.01, 0.03, 0.05] {
            let u = rad.origin_series(r);
            let d2 = (rad.origin_series(r + h) - 2.0 * u + rad.origin_series(r - h)) / (h * h);
            let want = rad.f(r, true) * u;
            assert!(
                (d2 - want).abs() < 1e-5 * want.abs(),
                "r={r}: {d2} vs {want}"
            );
        }
    }

    #[test]
    fn sturm_count_matches_levels() {
        let w = well(1973.92, 0.05);
        let cfg = OracleConfig::default();
        let g = Grid::new(&w, &cfg, cfg.base_step(&w)).unwrap();
        for window in [(-5.0, 4.0), (0.1, 7.0), (2.0, 3.0)] {
            let levels = oracle_levels_on_grid(&w, 1, window, &cfg, cfg.base_step(&w)).unwrap();
            let diff = node_count(&w, 1, window.1, &g) - node_count(&w, 1, window.0, &g);
            assert_eq!(levels.len(), diff, "{window:?}: {levels:?}");
        }
    }

    #[test]
    fn near_threshold_well_pulls_a_level_down() {
        // the free-space p-wave bound state appears at this depth
        let w = well(1973.92, 0.05);
        let levels = oracle_levels(&w, 1, (-2.0, 5.0), &OracleConfig::default()).unwrap();
        // lowest level strongly shifted below the noninteracting 2.5
        assert!(levels[0] < 2.4, "{levels:?}");
        // one level per oscillator branch above it
        assert!(levels.iter().any(|&e| e > 2.5 && e < 4.5), "{levels:?}");
    }

    #[test]
    fn richardson_order_is_four() {
        let w = well(50.0, 0.5);
        let cfg = OracleConfig {
            tolerance: 1e-14,
            ..OracleConfig::default()
        };
        let level = |h: f64| oracle_levels_on_grid(&w, 1, (-50.0, 2.0), &cfg, h).unwrap()[0];
        let (e1, e2, e3) = (level(0.0125), level(0.00625), level(0.003125));
        let order = ((e1 - e2) / (e2 - e3)).abs().log2();
        assert!(order >= 3.8 && order < 4.5, "order {order}: {e1} {e2} {e3}");
    }

    #[test]
    fn levels_decrease_with_depth() {
        let cfg = OracleConfig::default();
        let mut prev: Option<Vec<f64>> = None;
        for depth in [0.0, 400.0, 1200.0, 1800.0, 1950.0, 2100.0] {
            let lv = oracle_levels(&well(depth, 0.05), 1, (-3000.0, 7.0), &cfg).unwrap();
            if let Some(p) = &prev {
                // the j-th level overall can only move down
                for (a, b) in p.iter().zip(&lv) {
                    assert!(b <= a, "depth {depth}: {lv:?} vs {p:?}");
                }
            }
            prev = Some(lv);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = OracleConfig::default();
        assert!(matches!(
            oracle_levels(&well(1.0, 0.05), 2, (0.0, 3.0), &cfg),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            oracle_levels(&well(1.0, 0.05), 0, (3.0, 0.0), &cfg),
            Err(Error::InvalidWindow { .. })
        ));
        let bad = OracleConfig {
            match_radius: 20.0,
            ..cfg
        };
        assert!(matches!(
            oracle_levels(&well(1.0, 0.05), 0, (0.0, 3.0), &bad),
            Err(Error::InvalidConfig(_))
        ));
    }
}
