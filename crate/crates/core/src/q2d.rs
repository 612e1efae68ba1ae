//! p-wave scattering of two atoms with the axial motion frozen (quasi-2D).
//!
//! Energies `ℰ` are in `ħω_z` and lie in the single-mode window `½ < ℰ < 3/2`;
//! `x = ℰ/2 − ¼` and the in-plane wavenumber satisfies `k² d_z² = 4x`.
//!
//! ```text
//! W(x)  = 8x + 6x ln[x/(1−x)] + 4 Σ_k h_k(x) (2k−1)!!/(2^k k!)
//! h_k   = 2x − k + (3x−k)(k+½) ln[(k−x)/(k+1−x)]
//! cot δ₁ = −2/(3π k²) [√π / a_p³ − W(x)]
//! f(φ)  = −4 cos φ / [(1 + i cot δ₁) √(2πik)]
//! ```

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::roots::brent;

/// Terms summed explicitly before the tail model takes over.
pub const SERIES_TERMS: usize = 100_000;

/// Distance kept from the edges of the single-mode window.
pub const WINDOW_MARGIN: f64 = 1e-6;

/// `|W_real|` below which the critical volume is reported as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e-10;

// below this m = k − x the closed form of h_k is used
const ASYMPTOTIC_FROM: f64 = 20.0;

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `h_k(x)` for `k ≥ 1`.
fn h_term(k: usize, x: f64) -> f64 {
    let m = k as f64 - x;
    let b = 0.5 - x;
    let c = -2.0 * x * x - x;
    if m < ASYMPTOTIC_FROM {
        let k = k as f64;
        return 2.0 * x - k + (3.0 * x - k) * (k + 0.5) * -(1.0 / m).ln_1p();
    }
    // expansion in 1/m, free of the cancellation in the closed form
    let inv = 1.0 / m;
    let mut pow = inv;
    let mut sign = 1.0;
    let mut acc = 0.0;
    for p in 1..40 {
        let pf = p as f64;
        let term = sign * (1.0 / (pf + 2.0) - b / (pf + 1.0) + c / pf) * pow;
        acc += term;
        if term.abs() < 1e-18 * acc.abs().max(1e-300) {
            break;
        }
        pow *= inv;
        sign = -sign;
    }
    acc
}

/// Partial sums `Σ_{k=1}^{K} h_k w_k` at the requested `K` (ascending).
fn partial_sums(x: f64, checkpoints: &[usize]) -> Vec<f64> {
    let last = *checkpoints.last().unwrap_or(&0);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let mut acc = Neumaier::default();
    let mut w = 1.0;
    for k in 1..=last {
        w *= (2 * k - 1) as f64 / (2 * k) as f64;
        acc.add(h_term(k, x) * w);
        while next.peek().is_some_and(|&&c| c == k) {
            out.push(acc.value());
            next.next();
        }
    }
    out
}

/// Hurwitz zeta `ζ(s, a)` for `a` large, by Euler–Maclaurin.
fn hurwitz_zeta_large(s: f64, a: f64) -> f64 {
    // Σ_{n≥0} (a+n)^{−s}
    let mut total = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    let bernoulli = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0];
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in bernoulli.iter().enumerate() {
        let order = 2 * j + 1;
        total += b / fact * rising * a.powf(-s - order as f64);
        rising *= (s + order as f64) * (s + order as f64 + 1.0);
        fact *= ((order + 2) * (order + 3)) as f64;
    }
    total
}

/// Σ_{k>K} t_k with `t_k ≈ k^{−3/2}(c₀ + c₁/k + c₂/k²)` fitted on `(K/10, K]`.
fn fitted_tail(x: f64, big_k: usize) -> f64 {
    let start = big_k / 10;
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    let mut w = 1.0;
    let kf = big_k as f64;
    for k in 1..=big_k {
        w *= (2 * k - 1) as f64 / (2 * k) as f64;
        if k <= start {
            continue;
        }
        let t = h_term(k, x) * w;
        let kk = k as f64;
        let y = t * kk.powf(1.5);
        let u = kf / kk;
        let basis = [1.0, u, u * u];
        for i in 0..3 {
            aty[i] += basis[i] * y;
            for j in 0..3 {
                ata[i][j] += basis[i] * basis[j];
            }
        }
    }
    let c = solve3(ata, aty);
    // back to powers of 1/k: c_j K^j
    let a = kf + 1.0;
    c[0] * hurwitz_zeta_large(1.5, a)
        + c[1] * kf * hurwitz_zeta_large(2.5, a)
        + c[2] * kf * kf * hurwitz_zeta_large(3.5, a)
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for j in col..3 {
                a[row][j] -= f * a[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|j| a[row][j] * out[j]).sum();
        out[row] = (b[row] - s) / a[row][row];
    }
    out
}

/// `W(x)` for `0 ≤ x < ½`, with logs of negative arguments on the principal branch.
pub fn eval_w(x: f64) -> Result<Complex64> {
    if !(0.0..0.5).contains(&x) {
        return Err(Error::Domain {
            what: "W(x) needs 0 <= x < 1/2",
            value: x,
        });
    }
    let series = partial_sums(x, &[SERIES_TERMS])[0] + fitted_tail(x, SERIES_TERMS);
    if x == 0.0 {
        return Ok(Complex64::new(4.0 * series, 0.0));
    }
    let log_ratio = (x / (1.0 - x)).ln();
    // k = 0: ln[−x/(1−x)] = ln[x/(1−x)] + iπ
    let h0 = Complex64::new(2.0 * x + 1.5 * x * log_ratio, 1.5 * x * PI);
    Ok(Complex64::new(8.0 * x + 6.0 * x * log_ratio + 4.0 * series, 0.0) + 4.0 * h0)
}

/// `x = ℰ/2 − ¼`, rejecting energies outside the single-mode window.
pub fn energy_to_x(energy: f64) -> Result<f64> {
    if !(energy >= 0.5 + WINDOW_MARGIN && energy <= 1.5 - WINDOW_MARGIN) {
        return Err(Error::Domain {
            what: "energy must lie in the single-mode window (1/2, 3/2)",
            value: energy,
        });
    }
    Ok(0.5 * energy - 0.25)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q2DScatteringPoint {
    pub energy: f64,
    pub x: f64,
    /// In-plane wavenumber in `1/d_z`.
    pub k: f64,
    pub w_real: f64,
    pub w_imag: f64,
    pub cot_delta1: f64,
    /// `a_p³` in `d_z³`.
    pub a_p_volume: f64,
}

/// Scattering at one energy; `W` is evaluated once and reused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q2DChannel {
    energy: f64,
    x: f64,
    w: Complex64,
}

impl Q2DChannel {
    pub fn new(energy: f64) -> Result<Self> {
        let x = energy_to_x(energy)?;
        Ok(Q2DChannel {
            energy,
            x,
            w: eval_w(x)?,
        })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn k(&self) -> f64 {
        2.0 * self.x.sqrt()
    }

    pub fn w(&self) -> Complex64 {
        self.w
    }

    fn bracket_prefactor(&self) -> f64 {
        -2.0 / (3.0 * PI * 4.0 * self.x)
    }

    fn check_volume(a_p3: f64) -> Result<()> {
        if a_p3 == 0.0 || !a_p3.is_finite() {
            return Err(Error::Domain {
                what: "scattering volume must be finite and nonzero",
                value: a_p3,
            });
        }
        Ok(())
    }

    pub fn cot_delta1(&self, a_p3: f64) -> Result<f64> {
        Self::check_volume(a_p3)?;
        Ok(self.bracket_prefactor() * (PI.sqrt() / a_p3 - self.w.re))
    }

    /// The bracket evaluated with the complex `W`; its imaginary part is 1.
    pub fn cot_delta1_complex(&self, a_p3: f64) -> Result<Complex64> {
        Self::check_volume(a_p3)?;
        Ok(self.bracket_prefactor() * (PI.sqrt() / a_p3 - self.w))
    }

    pub fn amplitude(&self, a_p3: f64, phi: f64) -> Result<Complex64> {
        let cot = self.cot_delta1(a_p3)?;
        let i = Complex64::i();
        let root = (2.0 * PI * i * self.k()).sqrt();
        Ok(-4.0 * phi.cos() / ((1.0 + i * cot) * root))
    }

    /// `|f(0)|²`.
    pub fn forward_cross_section(&self, a_p3: f64) -> Result<f64> {
        Ok(self.amplitude(a_p3, 0.0)?.norm_sqr())
    }

    /// `√π / W_real`, the volume at which `cot δ₁ = 0`.
    pub fn critical_volume(&self) -> Result<f64> {
        critical_from_w(self.energy, self.w.re)
    }

    pub fn point(&self, a_p3: f64) -> Result<Q2DScatteringPoint> {
        Ok(Q2DScatteringPoint {
            energy: self.energy,
            x: self.x,
            k: self.k(),
            w_real: self.w.re,
            w_imag: self.w.im,
            cot_delta1: self.cot_delta1(a_p3)?,
            a_p_volume: a_p3,
        })
    }
}

fn critical_from_w(energy: f64, w: f64) -> Result<f64> {
    if w.abs() < DIVERGENCE_LIMIT {
        return Err(Error::CriticalVolumeDivergence { energy, w });
    }
    Ok(PI.sqrt() / w)
}

pub fn cot_delta1(energy: f64, a_p3: f64) -> Result<f64> {
    Q2DChannel::new(energy)?.cot_delta1(a_p3)
}

pub fn amplitude(energy: f64, a_p3: f64, phi: f64) -> Result<Complex64> {
    Q2DChannel::new(energy)?.amplitude(a_p3, phi)
}

/// Critical volume `V_c(ℰ)` in `d_z³`. Accepts `ℰ = ½` (threshold, `x = 0`).
pub fn critical_volume(energy: f64) -> Result<f64> {
    let x = if energy == 0.5 {
        0.0
    } else {
        energy_to_x(energy)?
    };
    critical_from_w(energy, eval_w(x)?.re)
}

/// Lowest `ℰ` in the single-mode window where `W_real(ℰ/2 − ¼)` changes sign.
pub fn resonance_disappearance_energy() -> Result<f64> {
    let w = |e: f64| -> Result<f64> {
        let x = if e == 0.5 { 0.0 } else { energy_to_x(e)? };
        Ok(eval_w(x)?.re)
    };
    let scan = 200;
    let (lo, hi) = (0.5, 1.5 - WINDOW_MARGIN);
    let mut prev_e = lo;
    let mut prev = w(lo)?;
    for i in 1..=scan {
        let e = lo + (hi - lo) * i as f64 / scan as f64;
        let v = w(e)?;
        if v == 0.0 {
            return Ok(e);
        }
        if v.signum() != prev.signum() {
            let a = prev_e.max(0.5 + WINDOW_MARGIN);
            return brent(w, a, e, 1e-13);
        }
        prev_e = e;
        prev = v;
    }
    Err(Error::ResonanceNotFound)
}
