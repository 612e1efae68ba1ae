use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which summand of a pancake-trap spectral sum hit a Gamma pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summand {
    /// Single index `k` of the `m = 0` sum (also used for the one-term s-wave formula).
    Single(usize),
    /// Index pair `(k, l)` of the `m = ±1` double sum.
    Pair(usize, usize),
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summand::Single(k) => write!(f, "k={k}"),
            Summand::Pair(k, l) => write!(f, "(k,l)=({k},{l})"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("Gamma pole: argument {0} is a non-positive integer")]
    PoleArgument(f64),

    #[error("Gamma ratio diverges: numerator argument {a} is a pole (denominator {b})")]
    RatioPole { a: f64, b: f64 },

    #[error("Gamma ratio undefined: both arguments {a} and {b} are poles")]
    DegenerateRatio { a: f64, b: f64 },

    #[error("{k}!! does not fit in 64 bits")]
    FactorialOverflow { k: i64 },

    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error(
        "zero-energy l={l} strength diverges (bound-state threshold); denominator {denominator:e}"
    )]
    Threshold { l: u32, denominator: f64 },

    #[error("effective range undefined: a_p^3 = {0}")]
    EffectiveRangeUndefined(f64),

    #[error("effective-range fit residual {residual:e} exceeds {tolerance:e}")]
    FitQuality { residual: f64, tolerance: f64 },

    #[error("spectral equation has a pole at E = {energy} (summand {summand})")]
    SpectrumPole { energy: f64, summand: Summand },

    #[error("window edge {edge} lies within tolerance of the pole at {pole}")]
    WindowEdgeAtPole { edge: f64, pole: f64 },

    #[error("invalid energy window [{lo}, {hi}]")]
    InvalidWindow { lo: f64, hi: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error(
        "root refinement did not converge in [{lo}, {hi}] (scan resolution {resolution} points)"
    )]
    NoConvergence { lo: f64, hi: f64, resolution: usize },

    #[error("grid not converged: halving step {step} moved an eigenvalue by {shift:e}")]
    GridResolution { step: f64, shift: f64 },

    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),

    #[error("critical volume diverges at E = {energy}: W = {w:e}")]
    CriticalVolumeDivergence { energy: f64, w: f64 },

    #[error("no sign change of W found in the single-mode window")]
    ResonanceNotFound,
}
