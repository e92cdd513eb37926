//! Gagliardo-Nirenberg best constant `B_N(σ)` by Weinstein-quotient ascent, and the
//! mass-critical threshold `c*_N`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Representation};
use crate::functionals::{dilate, energy};
use crate::grid::{Grid, GridSpec};
use crate::params::{PhysicsParams, Regime};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GnOptions {
    pub starts: usize,
    pub max_iterations: usize,
    /// Stop when the preconditioned gradient of `log W` falls below this, relative to `‖u‖`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for GnOptions {
    fn default() -> Self {
        GnOptions {
            starts: 5,
            max_iterations: 20_000,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnReport {
    pub sigma: f64,
    pub dim: usize,
    /// Best-constant estimate: the largest Weinstein quotient found.
    pub b_n: f64,
    /// `(N+4)/(N·B_N(4/N))`, critical exponent only.
    pub c_n: Option<f64>,
    /// `(γ C(N)/α)^{N/4}`, critical exponent only.
    pub c_star: Option<f64>,
    /// Final quotient of every start.
    pub start_values: Vec<f64>,
    /// `(max − min)/max` over the starts.
    pub spread: f64,
    pub iterations: Vec<usize>,
}

/// Grid used by default for the ascent: `L = 8π`, spacing `π/32` in one dimension.
pub fn gn_default_grid(dim: usize) -> GridSpec {
    let m = match dim {
        1 => 512,
        2 => 128,
        3 => 64,
        _ => 32,
    };
    GridSpec {
        dim,
        half_length: 8.0 * PI,
        points_per_axis: m,
    }
}

/// `σ > 0`, and `σ < 4/(N−4)` when `N > 4`.
pub fn check_admissible(sigma: f64, dim: usize) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
    }
    if dim > 4 && sigma >= 4.0 / (dim as f64 - 4.0) {
        return Err(Error::InvalidParams(format!(
            "sigma = {sigma} exceeds the H2 Sobolev bound 4/(N-4) for N = {dim}"
        )));
    }
    Ok(())
}

/// `W(u) = ‖u‖_{2σ+2}^{2σ+2} / (‖Δu‖₂^{σN/2} ‖u‖₂^{2+2σ−σN/2})`.
pub fn weinstein_quotient(u: &Field, sigma: f64) -> Result<f64> {
    check_admissible(sigma, u.grid().dim())?;
    let n = u.norms();
    if n.mass == 0.0 || n.lap_sq == 0.0 {
        return Err(Error::ZeroField);
    }
    let (a, b) = exponents(sigma, u.grid().dim());
    let p = u.lp_norm(2.0 * sigma + 2.0)?;
    Ok(p / (n.lap_sq.powf(a / 2.0) * n.mass.powf(b / 2.0)))
}

/// `(σN/2, 2+2σ−σN/2)`.
fn exponents(sigma: f64, dim: usize) -> (f64, f64) {
    let a = sigma * dim as f64 / 2.0;
    (a, 2.0 + 2.0 * sigma - a)
}

/// Maximizes `W` from `opts.starts` seeded random fields; returns the report and the best
/// maximizer, normalized to `‖u‖₂ = ‖Δu‖₂ = 1`.
pub fn estimate_bn(sigma: f64, grid: &Arc<Grid>, opts: &GnOptions) -> Result<(GnReport, Field)> {
    check_admissible(sigma, grid.dim())?;
    if opts.starts == 0 || opts.max_iterations == 0 || !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("starts, max_iterations and tol must be positive".into()));
    }
    let runs: Vec<Result<(f64, usize, Field)>> = (0..opts.starts)
        .into_par_iter()
        .map(|i| ascend(sigma, grid, random_start(grid, opts.seed.wrapping_add(i as u64)), opts))
        .collect();
    let mut values = Vec::new();
    let mut iterations = Vec::new();
    let mut best: Option<(f64, Field)> = None;
    for run in runs {
        let (w, it, u) = run?;
        values.push(w);
        iterations.push(it);
        if best.as_ref().is_none_or(|(bw, _)| w > *bw) {
            best = Some((w, u));
        }
    }
    let (b_n, u) = best.expect("at least one start");
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((
        GnReport {
            sigma,
            dim: grid.dim(),
            b_n,
            c_n: None,
            c_star: None,
            start_values: values,
            spread: (b_n - lo) / b_n,
            iterations,
        },
        u,
    ))
}

fn random_start(grid: &Arc<Grid>, seed: u64) -> Field {
    let noise = Field::random_band_limited(grid.clone(), 1.5, seed).to_physical();
    let mut values = noise.into_values();
    let d = grid.dim();
    let mut x = [0.0; crate::grid::MAX_DIM];
    for (flat, v) in values.iter_mut().enumerate() {
        grid.point(flat, &mut x[..d]);
        let r2: f64 = x[..d].iter().map(|t| t * t).sum();
        *v *= (-r2 / 8.0).exp();
    }
    Field::new(grid.clone(), Representation::Physical, values).expect("grid-sized")
}

/// Scale-quotiented preconditioned ascent on `log W`.
fn ascend(sigma: f64, grid: &Arc<Grid>, u0: Field, opts: &GnOptions) -> Result<(f64, usize, Field)> {
    let (a, b) = exponents(sigma, grid.dim());
    let p = 2.0 * sigma + 2.0;
    let mut u = renormalize(&u0)?;
    let mut logw = weinstein_quotient(&u, sigma)?.ln();
    let mut h = 0.5;
    let mut it = 0;
    let mut stale = 0;
    while it < opts.max_iterations {
        let n = u.norms();
        let lp = u.lp_norm(p)?;
        let mut force: Vec<Complex64> = u
            .physical_values()
            .iter()
            .map(|v| v * (p * v.norm_sqr().powf(sigma) / lp))
            .collect();
        let force_hat = {
            let f = Field::new(grid.clone(), Representation::Physical, std::mem::take(&mut force))?;
            f.to_frequency().into_values()
        };
        let spec = u.frequency_values();
        let dir: Vec<Complex64> = spec
            .iter()
            .zip(&force_hat)
            .zip(grid.xi_sq())
            .map(|((f, g), &k2)| {
                let grad = g - f * (a * k2 * k2 / n.lap_sq) - f * (b / n.mass);
                grad / (1.0 + k2 * k2)
            })
            .collect();
        let dn: f64 = dir.iter().map(|v| v.norm_sqr()).sum();
        let un: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
        if (dn / un).sqrt() < opts.tol {
            break;
        }
        let mut accepted = false;
        for _ in 0..50 {
            let trial: Vec<Complex64> = spec.iter().zip(&dir).map(|(f, d)| f + d * h).collect();
            let cand = Field::new(grid.clone(), Representation::Frequency, trial)?;
            if let Ok(cand) = renormalize(&cand) {
                if let Ok(w) = weinstein_quotient(&cand, sigma) {
                    let lw = w.ln();
                    if lw >= logw {
                        stale = if lw - logw < 1e-15 * logw.abs().max(1.0) { stale + 1 } else { 0 };
                        logw = lw;
                        u = cand;
                        accepted = true;
                        break;
                    }
                }
            }
            h *= 0.5;
        }
        if !accepted || stale > 50 {
            break;
        }
        h = (h * 1.3).min(2.0);
        it += 1;
    }
    Ok((logw.exp(), it, u))
}

/// Amplitude and dilation so that `‖u‖₂ = ‖Δu‖₂ = 1`; the dilation is skipped if it would
/// leave the grid.
fn renormalize(u: &Field) -> Result<Field> {
    let u = u.normalized_to(1.0)?;
    let lap = u.norms().lap_sq.sqrt();
    if lap == 0.0 {
        return Err(Error::ZeroField);
    }
    let s = 1.0 / lap;
    if (s - 1.0).abs() < 1e-9 {
        return Ok(u.to_physical());
    }
    match dilate(&u, s) {
        Ok(v) => Ok(v),
        Err(Error::Unrepresentable { .. }) => Ok(u.to_physical()),
        Err(e) => Err(e),
    }
}

/// `C(N) = (N+4)/(N·B)`.
pub fn critical_constant(dim: usize, b_n: f64) -> f64 {
    (dim as f64 + 4.0) / (dim as f64 * b_n)
}

/// Fills `c_n` and `c*_N = (γ C(N)/α)^{N/4}` from an estimate of `B_N(4/N)`.
pub fn critical_mass(params: &PhysicsParams, report: &GnReport) -> Result<GnReport> {
    if params.regime != Regime::Critical {
        return Err(Error::InvalidRegime(format!(
            "critical mass needs sigma*N = 4, got {}",
            params.sigma_n()
        )));
    }
    if report.dim != params.dim || (report.sigma - params.sigma).abs() > 1e-12 {
        return Err(Error::InvalidArgument("GN report does not match the parameters".into()));
    }
    if !(report.b_n > 0.0) {
        return Err(Error::InvalidArgument(format!("B_N must be positive, got {}", report.b_n)));
    }
    let c_n = critical_constant(params.dim, report.b_n);
    let mut out = report.clone();
    out.c_n = Some(c_n);
    out.c_star = Some((params.gamma * c_n / params.alpha).powf(params.dim as f64 / 4.0));
    Ok(out)
}

/// `E(w_s)` along the dilation ray of `w = √c·U/‖U‖₂`.
pub fn unbounded_witness(params: &PhysicsParams, c: f64, maximizer: &Field, s_list: &[f64]) -> Result<Vec<f64>> {
    if params.regime != Regime::Critical {
        return Err(Error::InvalidRegime(format!(
            "the dilation witness needs sigma*N = 4, got {}",
            params.sigma_n()
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {c}")));
    }
    let w = maximizer.normalized_to(c)?;
    s_list
        .iter()
        .map(|&s| Ok(energy(params, &dilate(&w, s)?)?.energy))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(check_admissible(0.0, 1).is_err());
        assert!(check_admissible(10.0, 4).is_ok());
        assert!(check_admissible(4.0, 5).is_err());
        assert!(check_admissible(3.9, 5).is_ok());
    }

    #[test]
    fn quotient_is_scale_invariant() {
        let g = Grid::new(gn_default_grid(1)).unwrap();
        let u = random_start(&g, 3);
        let w = weinstein_quotient(&u, 4.0).unwrap();
        let w2 = weinstein_quotient(&u.scaled(3.7), 4.0).unwrap();
        assert!((w - w2).abs() < 1e-10 * w);
        let w3 = weinstein_quotient(&dilate(&u, 1.7).unwrap(), 4.0).unwrap();
        assert!((w - w3).abs() < 1e-8 * w);
    }

    #[test]
    fn critical_mass_formula() {
        let p = PhysicsParams::normalized(1.0, 4.0, 1).unwrap();
        let rep = GnReport {
            sigma: 4.0,
            dim: 1,
            b_n: 2.0,
            c_n: None,
            c_star: None,
            start_values: vec![2.0],
            spread: 0.0,
            iterations: vec![0],
        };
        let r = critical_mass(&p, &rep).unwrap();
        assert!((r.c_n.unwrap() - 2.5).abs() < 1e-15);
        assert!((r.c_star.unwrap() - 5f64.powf(0.25)).abs() < 1e-15);
        let sub = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
        assert!(critical_mass(&sub, &rep).is_err());
    }
}
