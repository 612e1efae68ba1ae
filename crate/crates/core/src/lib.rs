//! Zero-range pseudopotential numerics for ultracold two-body problems.
//!
//! All quantities use trap units: `ħ = μ = ω = 1`, so lengths are measured
//! in the oscillator length `d = sqrt(ħ/μω)` and energies in `ħω`. For the
//! anisotropic traps `ω` is the axial frequency `ω_z`.
//!
//! Modules:
//!
//! * [`specialfn`]: log-Gamma with sign, Gamma ratios, double factorials and
//!   spherical Bessel functions.
//! * [`freescatter`]: square-well phase shifts, scattering length / volume /
//!   hyper-volume, energy-dependent strengths and effective range.
//! * [`trapspec`]: s-wave and p-wave spectra of two atoms in harmonic traps,
//!   including the self-consistent energy-dependent variant.
//! * [`traporacle`]: Numerov eigenvalues of a square well inside an isotropic
//!   trap, used as the exact reference.
//! * [`q2d`]: quasi-2D p-wave scattering and confinement-induced resonances.

pub mod error;
pub mod freescatter;
pub mod q2d;
pub mod roots;
pub mod specialfn;
pub mod traporacle;
pub mod trapspec;

pub use error::{Error, Result};
pub use freescatter::{PhaseShiftPoint, SquareWellPotential};
pub use q2d::{Q2DChannel, Q2DScatteringPoint};
pub use specialfn::{Sign, SignedLogValue};
pub use traporacle::OracleConfig;
pub use trapspec::{Channel, InteractionStrength, SpectrumResult, TrapGeometry};
