//! Energies, scalings, quotients and stationarity diagnostics.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{inverse_in_place, Field, Representation};
use crate::grid::MAX_DIM;
use crate::params::PhysicsParams;
use crate::resample::stretch_line;

/// Relative tail mass above which a dilated field is declared unrepresentable.
pub const DILATION_TAIL_TOL: f64 = 1e-8;

/// Individual terms of the energy and the derived values `E`, `I` and `Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `γ/2 ‖Δu‖₂²`
    pub lap_term: f64,
    /// `β/2 ‖∇u‖₂²`
    pub grad_term: f64,
    /// `α/(2σ+2) ‖u‖_{2σ+2}^{2σ+2}`
    pub nonlinear_term: f64,
    pub mass: f64,
    /// `E = lap_term − grad_term − nonlinear_term`
    pub energy: f64,
    /// Quadratic part `I = lap_term − grad_term`.
    pub quadratic: f64,
    /// `Φ = E + β²/(8γ)·mass`; computed as `‖(Δ+1)u‖² − nonlinear_term` when `γ=2, β=4`.
    pub phi: f64,
}

/// Raw ingredients shared by every diagnostic below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Terms {
    pub mass: f64,
    pub grad_sq: f64,
    pub lap_sq: f64,
    /// `‖u‖_{2σ+2}^{2σ+2}`
    pub lp: f64,
}

impl Terms {
    pub fn of(params: &PhysicsParams, u: &Field) -> Result<Terms> {
        let n = u.norms();
        Ok(Terms {
            mass: n.mass,
            grad_sq: n.grad_sq,
            lap_sq: n.lap_sq,
            lp: u.lp_norm(params.p())?,
        })
    }
}

pub fn energy(params: &PhysicsParams, u: &Field) -> Result<EnergyBreakdown> {
    let t = Terms::of(params, u)?;
    let lap_term = 0.5 * params.gamma * t.lap_sq;
    let grad_term = 0.5 * params.beta * t.grad_sq;
    let nonlinear_term = params.alpha / params.p() * t.lp;
    let energy = lap_term - grad_term - nonlinear_term;
    let phi = if params.is_normalized() {
        u.spectral_integral(|k2| (1.0 - k2) * (1.0 - k2)) - nonlinear_term
    } else {
        energy + params.threshold_slope() * t.mass
    };
    Ok(EnergyBreakdown {
        lap_term,
        grad_term,
        nonlinear_term,
        mass: t.mass,
        energy,
        quadratic: lap_term - grad_term,
        phi,
    })
}

/// `u_s(x) = s^{N/4} u(√s x)`, mass-preserving.
///
/// Evaluated by band-limited resampling along each axis. Fails when more than
/// [`DILATION_TAIL_TOL`] of the mass would leave the box (`s < 1`) or the Nyquist band
/// (`s > 1`).
pub fn dilate(u: &Field, s: f64) -> Result<Field> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidArgument(format!("dilation factor must be positive, got {s}")));
    }
    if s == 1.0 {
        return Ok(u.clone());
    }
    let grid = u.grid().clone();
    let d = grid.dim();
    let a = s.sqrt();
    let total = u.mass();
    if total == 0.0 {
        return Ok(u.to_physical());
    }

    if a > 1.0 {
        let cut = grid.spec().nyquist() / a;
        let spec = u.frequency_values();
        let mut tail = 0.0;
        let mut xi = [0.0; MAX_DIM];
        for (flat, c) in spec.iter().enumerate() {
            grid.wavevector(flat, &mut xi[..d]);
            if xi[..d].iter().any(|k| k.abs() > cut) {
                tail += c.norm_sqr();
            }
        }
        let tail = tail / grid.volume() / total;
        if tail > DILATION_TAIL_TOL {
            return Err(Error::Unrepresentable {
                tail,
                side: "spectrum beyond Nyquist band",
            });
        }
    } else {
        let cut = a * grid.half_length();
        let phys = u.physical_values();
        let mut x = [0.0; MAX_DIM];
        let mut tail = 0.0;
        for (flat, c) in phys.iter().enumerate() {
            grid.point(flat, &mut x[..d]);
            if x[..d].iter().any(|v| v.abs() > cut) {
                tail += c.norm_sqr();
            }
        }
        let tail = tail * grid.cell_volume() / total;
        if tail > DILATION_TAIL_TOL {
            return Err(Error::Unrepresentable {
                tail,
                side: "mass outside the box",
            });
        }
    }

    let mut values = u.physical_values().into_owned();
    let mut planner = FftPlanner::new();
    for axis in 0..d {
        grid.transform_axis(&mut values, axis, |line| {
            let out = stretch_line(line, a, &mut planner);
            line.copy_from_slice(&out);
        });
    }
    let amp = s.powf(d as f64 / 4.0);
    for v in values.iter_mut() {
        *v *= amp;
    }
    Field::new(grid, Representation::Physical, values)
}

/// `ũ = √τ u`: mass scales by `τ`, the nonlinear term by `τ^{σ+1}`.
pub fn amplitude_scale(u: &Field, tau: f64) -> Result<Field> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!("amplitude factor must be positive, got {tau}")));
    }
    Ok(u.scaled(tau.sqrt()))
}

/// `R(u) = ‖∇u‖⁴ / (‖Δu‖² ‖u‖²) ∈ (0, 1]`.
pub fn rayleigh_r(u: &Field) -> Result<f64> {
    let n = u.norms();
    if n.mass == 0.0 || n.lap_sq == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(n.grad_sq * n.grad_sq / (n.lap_sq * n.mass))
}

/// `inf_s I(u_s) = −β²/(8γ) ‖∇u‖⁴/‖Δu‖²`, the minimum of the quadratic part along the
/// dilation ray.
pub fn quadratic_ray_minimum(params: &PhysicsParams, u: &Field) -> Result<f64> {
    let n = u.norms();
    if n.lap_sq == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(-params.threshold_slope() * n.grad_sq * n.grad_sq / n.lap_sq)
}

/// `λ̂ = −(γ‖Δu‖² − β‖∇u‖² − α‖u‖_{2σ+2}^{2σ+2}) / ‖u‖²`.
pub fn lagrange_multiplier(params: &PhysicsParams, u: &Field) -> Result<f64> {
    let t = Terms::of(params, u)?;
    if t.mass == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(lambda_from_terms(params, &t))
}

/// Same multiplier from `−λc = 2E(u) − 2ασ/(2σ+2) ‖u‖_{2σ+2}^{2σ+2}`.
pub fn lagrange_multiplier_from_energy(params: &PhysicsParams, u: &Field) -> Result<f64> {
    let e = energy(params, u)?;
    if e.mass == 0.0 {
        return Err(Error::ZeroField);
    }
    let lp = e.nonlinear_term * params.p() / params.alpha;
    let rhs = 2.0 * e.energy - 2.0 * params.alpha * params.sigma / params.p() * lp;
    Ok(-rhs / e.mass)
}

pub(crate) fn lambda_from_terms(params: &PhysicsParams, t: &Terms) -> f64 {
    -(params.gamma * t.lap_sq - params.beta * t.grad_sq - params.alpha * t.lp) / t.mass
}

/// Relative residual of the dilation (Pohozaev) identity
/// `γ‖Δu‖² − β/2 ‖∇u‖² − σN/(2(2σ+2)) α ‖u‖_{2σ+2}^{2σ+2} = 0`.
pub fn pohozaev_residual(params: &PhysicsParams, u: &Field) -> Result<f64> {
    let t = Terms::of(params, u)?;
    if t.mass == 0.0 || t.lap_sq == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(pohozaev_from_terms(params, &t))
}

pub(crate) fn pohozaev_from_terms(params: &PhysicsParams, t: &Terms) -> f64 {
    let lhs = params.gamma * t.lap_sq
        - 0.5 * params.beta * t.grad_sq
        - params.sigma_n() / (2.0 * params.p()) * params.alpha * t.lp;
    lhs.abs() / (params.gamma * t.lap_sq)
}

/// `(2π)^{-N} ∫ (|ξ|² − β/(2γ))² |v̂|² dξ` for `v = u/‖u‖₂`.
pub fn shell_concentration(params: &PhysicsParams, u: &Field) -> Result<f64> {
    let mass = u.mass();
    if mass == 0.0 {
        return Err(Error::ZeroField);
    }
    let r2 = params.shell_radius_sq();
    Ok(u.spectral_integral(|k2| (k2 - r2) * (k2 - r2)) / mass)
}

/// `Q• = F⁻¹(|F Q|)`.
pub fn fourier_symmetrize(u: &Field) -> Field {
    let grid = u.grid().clone();
    let mut spec: Vec<Complex64> = u
        .frequency_values()
        .iter()
        .map(|c| Complex64::new(c.norm(), 0.0))
        .collect();
    inverse_in_place(&grid, &mut spec);
    Field::new(grid, Representation::Physical, spec).expect("same grid length")
}

/// Largest fraction of the mass found in a ball of the given radius, over all periodic
/// translates of the ball centre on the grid.
pub fn localization_fraction(u: &Field, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
    }
    let grid = u.grid().clone();
    let total = u.mass();
    if total == 0.0 {
        return Err(Error::ZeroField);
    }
    let d = grid.dim();
    let density: Vec<Complex64> = u
        .physical_values()
        .iter()
        .map(|c| Complex64::new(c.norm_sqr(), 0.0))
        .collect();
    // periodic indicator of the ball centred at the origin
    let mut x = [0.0; MAX_DIM];
    let ball: Vec<Complex64> = (0..grid.len())
        .map(|flat| {
            grid.point(flat, &mut x[..d]);
            let r2: f64 = x[..d].iter().map(|v| v * v).sum();
            Complex64::new(if r2 <= radius * radius { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    // circular cross-correlation via the unnormalized DFT
    let mut fa = density;
    let mut fb = ball;
    grid.fft_all(&mut fa, false);
    grid.fft_all(&mut fb, false);
    for (a, b) in fa.iter_mut().zip(&fb) {
        *a *= b.conj();
    }
    grid.fft_all(&mut fa, true);
    let scale = grid.cell_volume() / grid.len() as f64;
    let best = fa.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max) * scale;
    Ok((best / total).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridSpec};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid(dim: usize, l: f64, m: usize) -> Arc<Grid> {
        Grid::new(GridSpec::new(dim, l, m).unwrap()).unwrap()
    }

    fn gaussian(g: Arc<Grid>, width: f64) -> Field {
        Field::from_fn(g, move |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new((-r2 / (2.0 * width * width)).exp(), 0.0)
        })
    }

    #[test]
    fn zero_field_energy_and_errors() {
        let p = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
        let z = Field::zeros(grid(1, 4.0, 32));
        let e = energy(&p, &z).unwrap();
        assert_eq!(e.energy, 0.0);
        assert_eq!(e.phi, 0.0);
        assert!(rayleigh_r(&z).is_err());
        assert!(lagrange_multiplier(&p, &z).is_err());
        assert!(pohozaev_residual(&p, &z).is_err());
        assert!(shell_concentration(&p, &z).is_err());
    }

    #[test]
    fn gaussian_quotient_is_one_third() {
        let u = gaussian(grid(1, 12.0, 256), 1.0);
        assert!((rayleigh_r(&u).unwrap() - 1.0 / 3.0).abs() < 1e-8);
        let v = u.scaled(-3.5);
        assert!((rayleigh_r(&v).unwrap() - rayleigh_r(&u).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn dilation_identity_and_mass() {
        let u = gaussian(grid(1, 20.0, 256), 1.0);
        assert_eq!(dilate(&u, 1.0).unwrap().values(), u.values());
        for s in [0.25, 0.5, 2.0, 3.0] {
            let us = dilate(&u, s).unwrap();
            assert!((us.mass() - u.mass()).abs() < 1e-8 * u.mass(), "s={s}");
        }
    }

    #[test]
    fn dilation_flags_unrepresentable() {
        let u = gaussian(grid(1, 10.0, 64), 3.0);
        assert!(matches!(dilate(&u, 0.05), Err(Error::Unrepresentable { .. })));
        let narrow = gaussian(grid(1, 10.0, 64), 0.4);
        assert!(matches!(dilate(&narrow, 50.0), Err(Error::Unrepresentable { .. })));
        assert!(dilate(&narrow, 0.0).is_err());
    }

    #[test]
    fn amplitude_scaling_exact() {
        let p = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
        let u = gaussian(grid(1, 12.0, 128), 1.0);
        let v = amplitude_scale(&u, 3.0).unwrap();
        assert!((v.mass() - 3.0 * u.mass()).abs() < 1e-12 * u.mass());
        let ratio = v.lp_norm(p.p()).unwrap() / u.lp_norm(p.p()).unwrap();
        assert!((ratio - 9.0).abs() < 1e-10 * 9.0);
        assert_eq!(amplitude_scale(&u, 1.0).unwrap().values(), u.values());
        assert!(amplitude_scale(&u, -1.0).is_err());
    }

    #[test]
    fn multiplier_routes_agree_everywhere() {
        let p = PhysicsParams::new(1.3, 0.7, 2.0, 0.8, 2).unwrap();
        let u = Field::random_band_limited(grid(2, 6.0, 32), 4.0, 7);
        let a = lagrange_multiplier(&p, &u).unwrap();
        let b = lagrange_multiplier_from_energy(&p, &u).unwrap();
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn phi_forms_agree_under_normalization() {
        let p = PhysicsParams::normalized(1.0, 1.0, 2).unwrap();
        let u = Field::random_band_limited(grid(2, 6.0, 32), 3.0, 1);
        let e = energy(&p, &u).unwrap();
        let alt = e.energy + p.threshold_slope() * e.mass;
        assert!((e.phi - alt).abs() < 1e-10 * e.mass);
    }

    #[test]
    fn symmetrization_fixes_nonnegative_spectra() {
        let g = grid(1, 10.0, 128);
        let u = Field::from_spectrum_fn(g, |xi| Complex64::new((-(xi[0] - 1.0).powi(2)).exp(), 0.0));
        let q = fourier_symmetrize(&u);
        assert!(q.relative_distance(&u.to_physical()).unwrap() < 1e-12);
    }

    #[test]
    fn symmetrized_field_peaks_at_origin() {
        let g = grid(1, 8.0, 64);
        let u = Field::random_band_limited(g.clone(), 3.0, 11);
        let q = fourier_symmetrize(&u);
        let v = q.values();
        let m = g.points_per_axis();
        let centre = v[m / 2];
        assert!(centre.im.abs() < 1e-12 * centre.re);
        for j in 1..m {
            assert!((v[j] - v[m - j].conj()).norm() < 1e-12 * centre.re);
            assert!(v[j].norm() <= centre.re * (1.0 + 1e-12));
        }
    }

    #[test]
    fn localization_of_spread_and_peaked_fields() {
        let g = grid(1, 40.0, 256);
        let flat = Field::from_fn(g.clone(), |_| Complex64::new(1.0, 0.0));
        let f = localization_fraction(&flat, 10.0).unwrap();
        assert!((f - 0.25).abs() < 0.01, "uniform field fraction {f}");
        let bump = Field::from_fn(g, |x| Complex64::new((-(x[0] - 25.0).powi(2)).exp(), 0.0));
        assert!(localization_fraction(&bump, 10.0).unwrap() > 0.999);
    }

    #[test]
    fn shell_concentration_on_the_shell() {
        let p = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
        // L = 8π puts ξ = 1 on the lattice
        let g = grid(1, 8.0 * PI, 128);
        let u = Field::from_fn(g, |x| Complex64::new(x[0].cos(), 0.0));
        assert!(shell_concentration(&p, &u).unwrap() < 1e-20);
    }
}
