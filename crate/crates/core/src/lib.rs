#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Ground states of a mixed-dispersion nonlinear Schrödinger energy
//!
//! `E(u) = γ/2 ‖Δu‖₂² − β/2 ‖∇u‖₂² − α/(2σ+2) ‖u‖_{2σ+2}^{2σ+2}` on `S(c) = {‖u‖₂² = c}`,
//! discretized on a periodic spectral grid.

pub mod error;
pub mod families;
pub mod field;
pub mod functionals;
pub mod gn;
pub mod grid;
pub mod minimizer;
pub mod params;
mod resample;
pub mod special;

pub use error::{Error, Result};
pub use field::{Field, Norms, Representation};
pub use functionals::{
    amplitude_scale, dilate, energy, fourier_symmetrize, lagrange_multiplier,
    lagrange_multiplier_from_energy, localization_fraction, pohozaev_residual,
    quadratic_ray_minimum, rayleigh_r, shell_concentration, EnergyBreakdown,
};
pub use gn::{critical_mass, estimate_bn, unbounded_witness, weinstein_quotient, GnOptions, GnReport};
pub use grid::{Grid, GridSpec};
pub use minimizer::{
    classify_existence, minimize_from, minimize_on_sphere, scan, Classification, InitKind,
    MinimizeReport, Preconditioner, ScanRecord, ScanSummary, SolveOptions,
};
pub use params::{PhysicsParams, Regime};
pub use rustfft::num_complex::Complex64;
