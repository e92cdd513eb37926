//! Explicit test functions: the perturbed Gaussian `u_τ`, the Bessel cutoff family `ψ_m`
//! and the Fourier-bump sequence `u_n`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, GridSpec};
use crate::params::PhysicsParams;
use crate::special::{bessel_j_scaled, integrate};

/// Degree-9 smoothstep `t⁵(126 − 420t + 540t² − 315t³ + 70t⁴)`: 0 at 0, 1 at 1, C⁴.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t.powi(5) * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))))
}

fn smoothstep_d1(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    630.0 * (t * (1.0 - t)).powi(4)
}

fn smoothstep_d2(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    2520.0 * (t * (1.0 - t)).powi(3) * (1.0 - 2.0 * t)
}

/// Radial cutoff profile: 1 on `ρ ≤ 1`, 0 on `ρ ≥ 2`, monotone in between.
pub fn cutoff(rho: f64) -> f64 {
    1.0 - smoothstep(rho - 1.0)
}

/// `(φ, φ′, φ″)` at `ρ`.
fn cutoff_derivatives(rho: f64) -> (f64, f64, f64) {
    let t = rho - 1.0;
    (cutoff(rho), -smoothstep_d1(t), -smoothstep_d2(t))
}

/// Radial part of `ψ(x) = |x|^{-(N-2)/2} J_{(N-2)/2}(|x|)`. For `N = 1` this is the even
/// solution `√(2/π) cos r` of `ψ″ + ψ = 0`, the same formula with order `−1/2`.
pub fn psi_radial(dim: usize, r: f64) -> f64 {
    if dim == 1 {
        return (2.0 / PI).sqrt() * r.cos();
    }
    let nu = (dim as f64 - 2.0) / 2.0;
    bessel_j_scaled(nu, r.abs()).expect("valid order and argument")
}

/// `ψ′(r) = −r^{-(N-2)/2} J_{N/2}(r)`.
pub fn psi_radial_derivative(dim: usize, r: f64) -> f64 {
    if dim == 1 {
        return -(2.0 / PI).sqrt() * r.sin();
    }
    let nu = dim as f64 / 2.0;
    -r * bessel_j_scaled(nu, r.abs()).expect("valid order and argument")
}

/// `ψ(x)` for `N ≥ 2`, with the removable singularity at the origin filled in.
pub fn psi_profile(dim: usize, x: &[f64]) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidArgument(
            "psi_profile needs N >= 2; use psi_profile_1d for N = 1".into(),
        ));
    }
    if x.len() != dim {
        return Err(Error::InvalidArgument(format!("point has {} coordinates, expected {dim}", x.len())));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(psi_radial(dim, r))
}

/// The two one-dimensional solutions of `ψ″ + ψ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Psi1d {
    /// `√(2/π) cos x`
    Even,
    /// `√(2/π) sin x`
    Odd,
}

pub fn psi_profile_1d(x: f64, kind: Psi1d) -> f64 {
    let a = (2.0 / PI).sqrt();
    match kind {
        Psi1d::Even => a * x.cos(),
        Psi1d::Odd => a * x.sin(),
    }
}

fn require_normalized(params: &PhysicsParams) -> Result<()> {
    if !params.is_normalized() {
        return Err(Error::InvalidParams(
            "test families are defined for the normalized constants gamma = 2, beta = 4".into(),
        ));
    }
    Ok(())
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------------------
// Gaussian family

const GAUSS_DECAY: f64 = 6.0;

/// `u_τ(x) = π^{-N/4} c^{1/2} τ^{(N+1)/2} e^{ix₁} exp(−(τ⁴x₁² + τ²x₂² + … + τ²x_N²)/2)`.
pub fn gaussian_family(c: f64, tau: f64, grid: &Arc<Grid>) -> Result<Field> {
    require_positive("c", c)?;
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("tau must lie in (0, 1], got {tau}")));
    }
    gaussian_resolvable(grid.spec(), tau)?;
    let n = grid.dim() as f64;
    let amp = PI.powf(-n / 4.0) * c.sqrt() * tau.powf((n + 1.0) / 2.0);
    let (t2, t4) = (tau * tau, tau.powi(4));
    Ok(Field::from_fn(grid.clone(), |x| {
        let q = t4 * x[0] * x[0] + t2 * x[1..].iter().map(|v| v * v).sum::<f64>();
        Complex64::from_polar(amp * (-0.5 * q).exp(), x[0])
    }))
}

/// Checks that both length scales `τ⁻²` and `τ⁻¹` fit the box and the spectrum
/// `ξ ≈ e₁ ± τ²` fits below the Nyquist wavenumber.
pub fn gaussian_resolvable(spec: &GridSpec, tau: f64) -> Result<()> {
    let l = spec.half_length;
    let nyq = spec.nyquist();
    let t2 = tau * tau;
    if t2 * l < GAUSS_DECAY {
        return Err(Error::Unresolvable(format!(
            "x1 width 1/tau^2 = {:.3} needs half_length >= {:.3}, have {l:.3}",
            1.0 / t2,
            GAUSS_DECAY / t2
        )));
    }
    if spec.dim > 1 && tau * l < GAUSS_DECAY {
        return Err(Error::Unresolvable(format!(
            "transverse width 1/tau needs half_length >= {:.3}, have {l:.3}",
            GAUSS_DECAY / tau
        )));
    }
    if 1.0 + GAUSS_DECAY * t2 > nyq || (spec.dim > 1 && GAUSS_DECAY * tau > nyq) {
        return Err(Error::Unresolvable(format!(
            "spectrum of u_tau exceeds the Nyquist wavenumber {nyq:.3}"
        )));
    }
    Ok(())
}

/// A grid on which `u_τ` is resolved.
pub fn gaussian_grid(dim: usize, tau: f64) -> Result<GridSpec> {
    let l = GAUSS_DECAY * 1.25 / (tau * tau).min(if dim > 1 { tau } else { 1.0 });
    let need = 1.25 * f64::max(1.0 + GAUSS_DECAY * tau * tau, GAUSS_DECAY * tau);
    let m = ((2.0 * l * need / PI).ceil() as usize).next_power_of_two().max(16);
    GridSpec::new(dim, l, m)
}

/// Closed-form terms of `Φ(u_τ)` in normalized parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerms {
    pub tau: f64,
    /// `‖(Δ+1)u_τ‖₂²`
    pub quadratic: f64,
    /// `‖u_τ‖_{2σ+2}^{2σ+2}`
    pub lp: f64,
    pub phi: f64,
}

pub fn gaussian_closed_form(params: &PhysicsParams, c: f64, tau: f64) -> Result<GaussianTerms> {
    require_normalized(params)?;
    require_positive("c", c)?;
    require_positive("tau", tau)?;
    let n = params.dim as f64;
    let s = params.sigma;
    let t4 = tau.powi(4);
    let quadratic = c * t4 * gaussian_quadratic_factor(n, tau);
    let lp = PI.powf(-s * n / 2.0) * (s + 1.0).powf(-n / 2.0) * c.powf(s + 1.0) * tau.powf((n + 1.0) * s);
    Ok(GaussianTerms {
        tau,
        quadratic,
        lp,
        phi: quadratic - params.alpha / params.p() * lp,
    })
}

/// `‖(Δ+1)u_τ‖² / (c τ⁴)`.
fn gaussian_quadratic_factor(n: f64, tau: f64) -> f64 {
    let t2 = tau * tau;
    0.75 * t2 * t2 + 2.0 + (n - 1.0) * t2 / 2.0 + ((n - 1.0) * (n - 1.0) + 2.0 * (n - 1.0)) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianWitness {
    pub tau: f64,
    pub phi: f64,
}

/// First `τ = 2^{-k}`, `k = 0, 1, …`, with `Φ(u_τ) < 0`, or `None` if the sweep is exhausted.
pub fn gaussian_witness(params: &PhysicsParams, c: f64, max_k: u32) -> Result<Option<GaussianWitness>> {
    require_normalized(params)?;
    require_positive("c", c)?;
    let n = params.dim as f64;
    let s = params.sigma;
    let k_lp = PI.powf(-s * n / 2.0) * (s + 1.0).powf(-n / 2.0) * c.powf(s + 1.0) * params.alpha / params.p();
    for k in 0..=max_k {
        let tau = 0.5f64.powi(k as i32);
        // sign of Φ/τ⁴, free of underflow
        let scaled = c * gaussian_quadratic_factor(n, tau) - k_lp * tau.powf((n + 1.0) * s - 4.0);
        if scaled < 0.0 {
            let phi = gaussian_closed_form(params, c, tau)?.phi;
            return Ok(Some(GaussianWitness { tau, phi }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------------------
// Bessel family

/// Samples `ψ̃_m = c^{1/2} ψ_m / ‖ψ_m‖₂`, `ψ_m(x) = ψ(x) φ(|x|/m)`, centred at the origin.
/// In one dimension the even profile `√(2/π) cos x` is used.
pub fn bessel_family(c: f64, m: f64, grid: &Arc<Grid>) -> Result<Field> {
    require_positive("c", c)?;
    if !(m >= 1.0) {
        return Err(Error::InvalidArgument(format!("m must be >= 1, got {m}")));
    }
    let need = 2.0 * m + 1.0;
    if grid.half_length() < need {
        return Err(Error::BoxTooSmall {
            need,
            have: grid.half_length(),
        });
    }
    let dim = grid.dim();
    let raw = Field::from_fn(grid.clone(), |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        Complex64::new(psi_radial(dim, r) * cutoff(r / m), 0.0)
    });
    raw.normalized_to(c)
}

/// Norms of the unnormalized `ψ_m` by radial quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselNorms {
    pub m: f64,
    /// `‖ψ_m‖₂²`
    pub mass: f64,
    /// `‖(Δ+1)ψ_m‖₂²`
    pub lap_plus_one_sq: f64,
    /// `‖ψ_m‖_p^p`
    pub lp: f64,
}

/// Surface area of the unit sphere in `ℝ^N`.
pub fn sphere_area(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Radial quadrature of the three norms of `ψ_m`, with `p` the Lebesgue exponent.
///
/// Uses `(Δ+1)ψ_m = m⁻²ψ (φ″ + (N−1)φ′/ρ) + 2m⁻¹ φ′ ψ′` on the transition shell, since
/// `(Δ+1)ψ = 0`.
pub fn bessel_radial_norms(dim: usize, m: f64, p: f64) -> Result<BesselNorms> {
    if dim == 0 || dim > 4 {
        return Err(Error::InvalidArgument(format!("dimension must be in 1..=4, got {dim}")));
    }
    if !(m >= 1.0) {
        return Err(Error::InvalidArgument(format!("m must be >= 1, got {m}")));
    }
    if p < 1.0 {
        return Err(Error::InvalidArgument(format!("exponent must be >= 1, got {p}")));
    }
    let w = sphere_area(dim);
    let jac = |r: f64| r.powi(dim as i32 - 1);
    let order = 16;
    let prof = |r: f64| psi_radial(dim, r) * cutoff(r / m);
    let mass = w * integrate(|r| prof(r).powi(2) * jac(r), 0.0, 2.0 * m, order);
    let lp = w * integrate(|r| prof(r).abs().powf(p) * jac(r), 0.0, 2.0 * m, order);
    let nm1 = dim as f64 - 1.0;
    let residual = |r: f64| {
        let rho = r / m;
        let (_, d1, d2) = cutoff_derivatives(rho);
        (psi_radial(dim, r) * (d2 + nm1 * d1 / rho) / (m * m) + 2.0 * d1 * psi_radial_derivative(dim, r) / m).powi(2)
    };
    let lap_plus_one_sq = w * integrate(|r| residual(r) * jac(r), m, 2.0 * m, order);
    Ok(BesselNorms {
        m,
        mass,
        lap_plus_one_sq,
        lp,
    })
}

/// `Φ(ψ̃_m)` from the radial norms in normalized parameters.
pub fn bessel_phi(params: &PhysicsParams, c: f64, m: f64) -> Result<f64> {
    require_normalized(params)?;
    require_positive("c", c)?;
    let b = bessel_radial_norms(params.dim, m, params.p())?;
    Ok(c * b.lap_plus_one_sq / b.mass
        - params.alpha / params.p() * c.powf(params.sigma + 1.0) * b.lp / b.mass.powf(params.sigma + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselWitness {
    pub m: f64,
    pub phi: f64,
}

/// First `m = 2^j`, `j = 0, …, max_j`, with `Φ(ψ̃_m) < 0`.
pub fn bessel_witness(params: &PhysicsParams, c: f64, max_j: u32) -> Result<Option<BesselWitness>> {
    for j in 0..=max_j {
        let m = 2f64.powi(j as i32);
        let phi = bessel_phi(params, c, m)?;
        if phi < 0.0 {
            return Ok(Some(BesselWitness { m, phi }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------------------
// Fourier bumps

/// Lattice points per bump radius required in frequency space.
const BUMP_POINTS: f64 = 8.0;

/// `u_n` with `û_n(ξ) ∝ n^{N/2} φ(n(ξ − e₁))`, `φ(y) = 1 − S(|y|)` supported in the unit ball,
/// normalized to mass `c`.
pub fn bump_family(c: f64, n: u32, grid: &Arc<Grid>) -> Result<Field> {
    require_positive("c", c)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let spec = grid.spec();
    let nf = n as f64;
    let spacing = PI / spec.half_length;
    if (1.0 / nf) / spacing < BUMP_POINTS {
        return Err(Error::Unresolvable(format!(
            "bump radius 1/{n} spans fewer than {BUMP_POINTS} lattice spacings; need half_length >= {:.3}",
            BUMP_POINTS * PI * nf
        )));
    }
    if 1.0 + 1.0 / nf >= spec.nyquist() {
        return Err(Error::Unresolvable(format!(
            "bump support reaches the Nyquist wavenumber {:.3}",
            spec.nyquist()
        )));
    }
    let amp = nf.powf(spec.dim as f64 / 2.0);
    let raw = Field::from_spectrum_fn(grid.clone(), |xi| {
        let d2 = (xi[0] - 1.0).powi(2) + xi[1..].iter().map(|v| v * v).sum::<f64>();
        let y = nf * d2.sqrt();
        Complex64::new(if y < 1.0 { amp * (1.0 - smoothstep(y)) } else { 0.0 }, 0.0)
    });
    raw.normalized_to(c)
}

/// A grid resolving `u_n`: `L = 8πn`, Nyquist wavenumber at least 2 and above `1 + 1/n`.
pub fn bump_grid(dim: usize, n: u32) -> Result<GridSpec> {
    let l = BUMP_POINTS * PI * n as f64;
    let need = (4.0 * l / PI).max(2.0 * l * (1.0 + 1.0 / n as f64) / PI + 1.0);
    let m = (need.ceil() as usize).next_power_of_two().max(16);
    GridSpec::new(dim, l, m)
}

// ---------------------------------------------------------------------------------------
// Power-law fits

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    GaussianTau,
    BesselM,
    BumpN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyBoundReport {
    pub family: FamilyKind,
    pub parameter_values: Vec<f64>,
    pub observed: Vec<f64>,
    pub fitted_slope: f64,
    /// Natural log of the prefactor.
    pub fitted_intercept: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_bound(family: FamilyKind, parameters: &[f64], observed: &[f64]) -> Result<FamilyBoundReport> {
    if parameters.len() < 3 || parameters.len() != observed.len() {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 matching points, got {} parameters and {} observations",
            parameters.len(),
            observed.len()
        )));
    }
    if parameters.windows(2).any(|w| !(w[0] < w[1])) || parameters[0] <= 0.0 {
        return Err(Error::InvalidArgument("parameters must be positive and strictly increasing".into()));
    }
    if let Some(bad) = observed.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidArgument(format!("observables must be positive, got {bad}")));
    }
    let xs: Vec<f64> = parameters.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = observed.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(FamilyBoundReport {
        family,
        parameter_values: parameters.to_vec(),
        observed: observed.to_vec(),
        fitted_slope: slope,
        fitted_intercept: my - slope * mx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{energy, rayleigh_r};

    #[test]
    fn smoothstep_endpoints_and_monotone() {
        assert_eq!(smoothstep(0.0), 0.0);
        assert!((smoothstep(1.0) - 1.0).abs() < 1e-14);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-14);
        let mut prev = 0.0;
        for i in 1..=100 {
            let v = smoothstep(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
        assert_eq!(cutoff(0.3), 1.0);
        assert_eq!(cutoff(2.5), 0.0);
    }

    #[test]
    fn cutoff_derivatives_match_differences() {
        let h = 1e-5;
        for rho in [1.1, 1.37, 1.5, 1.8] {
            let (_, d1, d2) = cutoff_derivatives(rho);
            let fd1 = (cutoff(rho + h) - cutoff(rho - h)) / (2.0 * h);
            let fd2 = (cutoff(rho + h) - 2.0 * cutoff(rho) + cutoff(rho - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-7);
            assert!((d2 - fd2).abs() < 1e-3);
        }
    }

    #[test]
    fn psi_at_origin() {
        assert!((psi_profile(3, &[0.0; 3]).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-14);
        assert!((psi_profile(4, &[0.0; 4]).unwrap() - 0.5).abs() < 1e-14);
        assert!((psi_profile(2, &[0.0; 2]).unwrap() - 1.0).abs() < 1e-14);
        assert!(psi_profile(1, &[0.0]).is_err());
        let r: f64 = 2.3;
        let want = (2.0 / PI).sqrt() * r.sin() / r;
        assert!((psi_profile(3, &[r, 0.0, 0.0]).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn psi_derivative_matches_differences() {
        let h = 1e-6;
        for dim in 1..=4 {
            for r in [0.5, 3.0, 14.0, 40.0] {
                let fd = (psi_radial(dim, r + h) - psi_radial(dim, r - h)) / (2.0 * h);
                assert!((psi_radial_derivative(dim, r) - fd).abs() < 1e-8, "N={dim} r={r}");
            }
        }
    }

    #[test]
    fn gaussian_member_mass_and_closed_forms() {
        let params = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
        let tau = 1.0;
        let g = Grid::new(gaussian_grid(1, tau).unwrap()).unwrap();
        let u = gaussian_family(1.0, tau, &g).unwrap();
        assert!((u.mass() - 1.0).abs() < 1e-10);
        let e = energy(&params, &u).unwrap();
        let cf = gaussian_closed_form(&params, 1.0, tau).unwrap();
        assert!((cf.quadratic - 2.75).abs() < 1e-14);
        assert!((e.phi - cf.phi).abs() < 1e-8 * cf.phi.abs());
        assert!((e.nonlinear_term - 0.25 / (2.0 * PI).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn gaussian_rejects_unresolved_members() {
        let g = Grid::new(GridSpec::new(1, 20.0, 64).unwrap()).unwrap();
        assert!(matches!(gaussian_family(1.0, 0.1, &g), Err(Error::Unresolvable(_))));
        assert!(gaussian_family(1.0, 1.5, &g).is_err());
    }

    #[test]
    fn gaussian_witness_n1_sigma1() {
        let params = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
        let w = gaussian_witness(&params, 1.0, 40).unwrap().unwrap();
        assert_eq!(w.tau, 0.125);
        assert!(w.phi < 0.0);
        let t: f64 = 0.2;
        let cf = gaussian_closed_form(&params, 1.0, t).unwrap();
        let want = t.powi(4) * (0.75 * t.powi(4) + 2.0) - t * t / (4.0 * (2.0 * PI).sqrt());
        assert!((cf.phi - want).abs() < 1e-15);
    }

    #[test]
    fn bessel_family_mass_and_box() {
        let g = Grid::new(GridSpec::new(2, 16.0 * PI, 128).unwrap()).unwrap();
        let u = bessel_family(0.7, 8.0, &g).unwrap();
        assert!((u.mass() - 0.7).abs() < 1e-10);
        assert!(matches!(bessel_family(1.0, 30.0, &g), Err(Error::BoxTooSmall { .. })));
    }

    #[test]
    fn radial_norms_agree_with_grid() {
        let m = 6.0;
        let g = Grid::new(GridSpec::new(2, 16.0 * PI, 256).unwrap()).unwrap();
        let raw = Field::from_fn(g.clone(), |x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            Complex64::new(psi_radial(2, r) * cutoff(r / m), 0.0)
        });
        let b = bessel_radial_norms(2, m, 4.0).unwrap();
        assert!((raw.mass() - b.mass).abs() < 1e-8 * b.mass);
        assert!((raw.lp_norm(4.0).unwrap() - b.lp).abs() < 1e-8 * b.lp);
        let d = raw.spectral_integral(|k2| (1.0 - k2) * (1.0 - k2));
        assert!((d - b.lap_plus_one_sq).abs() < 1e-6 * b.lap_plus_one_sq, "{d} vs {}", b.lap_plus_one_sq);
    }

    #[test]
    fn bump_quotient_increases() {
        let mut prev = 0.0;
        for n in [2, 4, 8] {
            let g = Grid::new(bump_grid(1, n).unwrap()).unwrap();
            let r = rayleigh_r(&bump_family(1.0, n, &g).unwrap()).unwrap();
            assert!(r > prev && r < 1.0);
            prev = r;
        }
        let g = Grid::new(GridSpec::new(1, 10.0, 64).unwrap()).unwrap();
        assert!(matches!(bump_family(1.0, 4, &g), Err(Error::Unresolvable(_))));
    }

    #[test]
    fn fit_recovers_power_law() {
        let xs = [1.0, 2.0, 5.0, 11.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 7.0 * x.powi(3)).collect();
        let f = fit_bound(FamilyKind::GaussianTau, &xs, &ys).unwrap();
        assert!((f.fitted_slope - 3.0).abs() < 1e-10);
        assert!((f.fitted_intercept - 7f64.ln()).abs() < 1e-10);
        assert!(fit_bound(FamilyKind::GaussianTau, &xs[..2], &ys[..2]).is_err());
        assert!(fit_bound(FamilyKind::GaussianTau, &xs, &[1.0, -1.0, 2.0, 3.0]).is_err());
        assert!(fit_bound(FamilyKind::GaussianTau, &[2.0, 1.0, 3.0], &[1.0, 1.0, 1.0]).is_err());
    }
}
