//! Minimization of `E` on the mass sphere `S(c)` by a preconditioned, renormalized
//! gradient flow, the existence classifier and the `(σ, c)` scanner.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{cutoff, gaussian_resolvable, psi_radial};
use crate::field::{Field, Representation};
use crate::functionals::{
    lambda_from_terms, localization_fraction, pohozaev_from_terms, shell_concentration, Terms,
};
use crate::grid::{Grid, GridSpec, MAX_DIM};
use crate::params::{PhysicsParams, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preconditioner {
    None,
    /// `(γ(|ξ|² − β/2γ)² + μ)⁻¹` with `μ` tracking `λ̂ − β²/4γ`.
    Biharmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    GaussianTauOpt,
    BesselMOpt,
    Random,
    Provided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    MinimizerFound,
    VanishingSuspected,
    NotConverged,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::MinimizerFound => "minimizer_found",
            Classification::VanishingSuspected => "vanishing_suspected",
            Classification::NotConverged => "not_converged",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Initial step length; adapted by backtracking.
    pub step_size: f64,
    /// Upper bound on the adapted step length.
    pub max_step: f64,
    /// Stop when `‖d‖₂/‖u‖₂ < tol_gradient`, `d` the preconditioned projected gradient.
    pub tol_gradient: f64,
    /// Margin tolerance relative to the threshold scale `β²c/(8γ)`.
    pub tol_margin: f64,
    pub preconditioner: Preconditioner,
    /// Starting points of the multi-start; best final energy wins.
    pub init: Vec<InitKind>,
    pub seed: u64,
    /// Ball radius of the localization diagnostic; `None` means `L/4`.
    pub localization_radius: Option<f64>,
    /// Minimal localized mass fraction for a minimizer.
    pub localization_threshold: f64,
    /// Declared critical mass `ĉ*`, required when `σN = 4`.
    pub critical_mass: Option<f64>,
    /// Truncate the nonlinear force to `|k| ≤ M/3` per axis.
    pub dealias: bool,
    /// Keep the energy of every accepted iterate.
    pub record_history: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 20_000,
            step_size: 0.5,
            max_step: 1.0,
            tol_gradient: 1e-8,
            tol_margin: 1e-6,
            preconditioner: Preconditioner::Biharmonic,
            init: vec![InitKind::GaussianTauOpt, InitKind::BesselMOpt, InitKind::Random],
            seed: 0,
            localization_radius: None,
            localization_threshold: 0.5,
            critical_mass: None,
            dealias: false,
            record_history: false,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be >= 1".into()));
        }
        for (name, v) in [
            ("step_size", self.step_size),
            ("max_step", self.max_step),
            ("tol_gradient", self.tol_gradient),
            ("tol_margin", self.tol_margin),
            ("localization_threshold", self.localization_threshold),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(r) = self.localization_radius {
            if !(r > 0.0) {
                return Err(Error::InvalidArgument(format!("localization_radius must be positive, got {r}")));
            }
        }
        if self.init.is_empty() {
            return Err(Error::InvalidArgument("at least one init kind is required".into()));
        }
        Ok(())
    }

    /// Absolute margin tolerance at mass `c`.
    pub fn margin_tolerance(&self, params: &PhysicsParams, c: f64) -> f64 {
        self.tol_margin * params.threshold_slope() * c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub c: f64,
    pub m_hat: f64,
    pub lambda_hat: f64,
    pub pohozaev_residual: f64,
    pub shell_concentration: f64,
    /// `‖Δu‖₂/‖u‖₂`
    pub ratio_lap: f64,
    /// `‖∇u‖₂/‖u‖₂`
    pub ratio_grad: f64,
    /// `m̂ + β²c/(8γ)`
    pub margin: f64,
    /// Absolute margin tolerance used by the classifier.
    pub tol_margin: f64,
    /// Largest fraction of the mass in a ball of the localization radius.
    pub localization: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub classification: Classification,
    /// Initialization that produced the reported state.
    pub init: InitKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub energy_history: Vec<f64>,
}

/// Energy, multiplier and all diagnostics of a state on `S(c)`.
fn build_report(
    params: &PhysicsParams,
    u: &Field,
    c: f64,
    outcome: &FlowOutcome,
    opts: &SolveOptions,
) -> Result<MinimizeReport> {
    let t = Terms::of(params, u)?;
    let m_hat = 0.5 * params.gamma * t.lap_sq - 0.5 * params.beta * t.grad_sq - params.alpha / params.p() * t.lp;
    let margin = m_hat + params.threshold_slope() * c;
    let tol_margin = opts.margin_tolerance(params, c);
    let radius = opts.localization_radius.unwrap_or(u.grid().half_length() / 4.0);
    let localization = localization_fraction(u, radius)?;
    let classification = if !outcome.converged {
        Classification::NotConverged
    } else if margin < -tol_margin && localization >= opts.localization_threshold {
        Classification::MinimizerFound
    } else {
        Classification::VanishingSuspected
    };
    Ok(MinimizeReport {
        c,
        m_hat,
        lambda_hat: lambda_from_terms(params, &t),
        pohozaev_residual: pohozaev_from_terms(params, &t),
        shell_concentration: shell_concentration(params, u)?,
        ratio_lap: (t.lap_sq / t.mass).sqrt(),
        ratio_grad: (t.grad_sq / t.mass).sqrt(),
        margin,
        tol_margin,
        localization,
        iterations: outcome.iterations,
        residual: outcome.residual,
        converged: outcome.converged,
        classification,
        init: outcome.init,
        energy_history: outcome.history.clone(),
    })
}

fn check_regime(params: &PhysicsParams, c: f64, opts: &SolveOptions) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidArgument(format!("mass c must be positive, got {c}")));
    }
    if params.regime == Regime::Critical {
        match opts.critical_mass {
            None => {
                return Err(Error::InvalidRegime(
                    "sigma*N = 4 requires a declared critical mass c*".into(),
                ))
            }
            Some(cs) if c >= cs => {
                return Err(Error::InvalidRegime(format!(
                    "critical regime: c = {c} is not below the critical mass c* = {cs}"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Minimizes `E` on `S(c)` from every configured initialization and returns the best state.
/// A converged run is preferred over an unconverged one whose energy is lower by less than
/// the margin tolerance.
///
/// A flow that exhausts `max_iterations` is reported with classification `not_converged`
/// rather than as an error.
pub fn minimize_on_sphere(
    params: &PhysicsParams,
    grid: &Arc<Grid>,
    c: f64,
    opts: &SolveOptions,
) -> Result<(MinimizeReport, Field)> {
    minimize_with(params, grid, c, opts, None)
}

/// As [`minimize_on_sphere`], starting from `u0` (rescaled to mass `c`) in place of the
/// `provided` init, or alone if no other init is configured.
pub fn minimize_from(params: &PhysicsParams, u0: &Field, c: f64, opts: &SolveOptions) -> Result<(MinimizeReport, Field)> {
    minimize_with(params, u0.grid(), c, opts, Some(u0))
}

fn minimize_with(
    params: &PhysicsParams,
    grid: &Arc<Grid>,
    c: f64,
    opts: &SolveOptions,
    provided: Option<&Field>,
) -> Result<(MinimizeReport, Field)> {
    opts.validate()?;
    check_regime(params, c, opts)?;
    if grid.dim() != params.dim {
        return Err(Error::InvalidArgument(format!(
            "grid dimension {} does not match params dimension {}",
            grid.dim(),
            params.dim
        )));
    }
    let mut kinds = opts.init.clone();
    if provided.is_some() && !kinds.contains(&InitKind::Provided) {
        kinds.push(InitKind::Provided);
    }
    kinds.dedup();

    let mut starts = Vec::new();
    for kind in kinds {
        let u0 = match kind {
            InitKind::GaussianTauOpt => gaussian_start(params, grid, c),
            InitKind::BesselMOpt => bessel_start(params, grid, c),
            InitKind::Random => Some(random_start(params, grid, c, opts.seed)),
            InitKind::Provided => match provided {
                Some(u) => {
                    if !Arc::ptr_eq(u.grid(), grid) && u.grid().spec() != grid.spec() {
                        return Err(Error::GridMismatch);
                    }
                    Some(u.to_physical().normalized_to(c)?)
                }
                None => {
                    return Err(Error::InvalidArgument(
                        "init 'provided' requires an initial field".into(),
                    ))
                }
            },
        };
        if let Some(u) = u0 {
            starts.push((kind, u));
        }
    }
    if starts.is_empty() {
        return Err(Error::InvalidArgument(
            "no initialization is representable on this grid".into(),
        ));
    }

    let runs: Vec<(FlowOutcome, Field)> = starts
        .into_par_iter()
        .map(|(kind, u)| {
            let flow = Flow::new(params, grid, c, opts);
            flow.run(u, kind)
        })
        .collect();

    let best_energy = runs.iter().map(|r| r.0.energy).fold(f64::INFINITY, f64::min);
    let within = opts.margin_tolerance(params, c);
    let certified = runs.iter().any(|r| r.0.converged && r.0.energy <= best_energy + within);
    let (outcome, field) = runs
        .into_iter()
        .filter(|r| !certified || r.0.converged)
        .min_by(|a, b| compare_runs(&a.0, &b.0))
        .expect("at least one run");
    let report = build_report(params, &field, c, &outcome, opts)?;
    Ok((report, field))
}

fn compare_runs(a: &FlowOutcome, b: &FlowOutcome) -> Ordering {
    let tie = 1e-10 * a.energy.abs().max(b.energy.abs()).max(1e-300);
    if (a.energy - b.energy).abs() <= tie {
        b.converged
            .cmp(&a.converged)
            .then(a.iterations.cmp(&b.iterations))
    } else {
        a.energy.total_cmp(&b.energy)
    }
}

/// Runs the solver and reduces the result to a scan record.
pub fn classify_existence(params: &PhysicsParams, grid: &Arc<Grid>, c: f64, opts: &SolveOptions) -> Result<ScanRecord> {
    let (r, _) = minimize_on_sphere(params, grid, c, opts)?;
    Ok(ScanRecord {
        sigma: params.sigma,
        c,
        margin: Some(r.margin),
        m_hat: Some(r.m_hat),
        lambda_hat: Some(r.lambda_hat),
        localization: Some(r.localization),
        iterations: r.iterations,
        classification: Some(r.classification),
        error: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub sigma: f64,
    pub c: f64,
    pub margin: Option<f64>,
    pub m_hat: Option<f64>,
    pub lambda_hat: Option<f64>,
    pub localization: Option<f64>,
    pub iterations: usize,
    pub classification: Option<Classification>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C0Estimate {
    pub sigma: f64,
    /// Smallest scanned `c` classified `minimizer_found`.
    pub c0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub records: Vec<ScanRecord>,
    pub c0_estimate: Vec<C0Estimate>,
}

/// One independent solve per `(σ, c)` pair, in parallel; records sorted by `(σ, c)`.
pub fn scan(
    template: &PhysicsParams,
    grid: &Arc<Grid>,
    sigmas: &[f64],
    cs: &[f64],
    opts: &SolveOptions,
) -> Result<ScanSummary> {
    opts.validate()?;
    if sigmas.is_empty() || cs.is_empty() {
        return Err(Error::InvalidArgument("sigma and c lists must be non-empty".into()));
    }
    let mut pairs: Vec<(f64, f64)> = sigmas
        .iter()
        .flat_map(|&s| cs.iter().map(move |&c| (s, c)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pairs.dedup();

    let records: Vec<ScanRecord> = pairs
        .par_iter()
        .map(|&(sigma, c)| {
            let attempt = template
                .with_sigma(sigma)
                .and_then(|p| classify_existence(&p, grid, c, opts));
            attempt.unwrap_or_else(|e| ScanRecord {
                sigma,
                c,
                margin: None,
                m_hat: None,
                lambda_hat: None,
                localization: None,
                iterations: 0,
                classification: None,
                error: Some(e.to_string()),
            })
        })
        .collect();

    let mut c0_estimate: Vec<C0Estimate> = Vec::new();
    for r in &records {
        if c0_estimate.last().map(|e| e.sigma) != Some(r.sigma) {
            c0_estimate.push(C0Estimate { sigma: r.sigma, c0: None });
        }
        let slot = c0_estimate.last_mut().expect("pushed above");
        if slot.c0.is_none() && r.classification == Some(Classification::MinimizerFound) {
            slot.c0 = Some(r.c);
        }
    }
    Ok(ScanSummary { records, c0_estimate })
}

// ---------------------------------------------------------------------------------------
// Initial states

fn shell_wavenumber(params: &PhysicsParams) -> f64 {
    params.shell_radius_sq().sqrt()
}

/// Perturbed Gaussian with carrier `k₀ = √(β/2γ)` along `x₁`, lowest energy over a sweep of
/// resolvable widths.
fn gaussian_start(params: &PhysicsParams, grid: &Arc<Grid>, c: f64) -> Option<Field> {
    let k0 = shell_wavenumber(params);
    let spec = grid.spec();
    let scaled = GridSpec {
        dim: spec.dim,
        half_length: spec.half_length * k0,
        points_per_axis: spec.points_per_axis,
    };
    let mut best: Option<(f64, Field)> = None;
    for k in 0..=40 {
        let tau = 2f64.powf(-(k as f64) / 4.0);
        if gaussian_resolvable(&scaled, tau).is_err() {
            continue;
        }
        let (t2, t4) = (tau * tau, tau.powi(4));
        let u = Field::from_fn(grid.clone(), |x| {
            let y0 = k0 * x[0];
            let q = t4 * y0 * y0 + t2 * k0 * k0 * x[1..].iter().map(|v| v * v).sum::<f64>();
            Complex64::from_polar((-0.5 * q).exp(), y0)
        });
        best = keep_lower(params, best, u, c);
    }
    best.map(|(_, u)| u)
}

/// `ψ(k₀|x|) φ(k₀|x|/m)` over `m = 2^j` that fit the box.
fn bessel_start(params: &PhysicsParams, grid: &Arc<Grid>, c: f64) -> Option<Field> {
    let k0 = shell_wavenumber(params);
    let dim = grid.dim();
    let mut best: Option<(f64, Field)> = None;
    let mut m = 1.0;
    while (2.0 * m + 1.0) / k0 <= grid.half_length() {
        let u = Field::from_fn(grid.clone(), |x| {
            let r = k0 * x.iter().map(|v| v * v).sum::<f64>().sqrt();
            Complex64::new(psi_radial(dim, r) * cutoff(r / m), 0.0)
        });
        best = keep_lower(params, best, u, c);
        m *= 2.0;
    }
    best.map(|(_, u)| u)
}

fn keep_lower(params: &PhysicsParams, best: Option<(f64, Field)>, u: Field, c: f64) -> Option<(f64, Field)> {
    let u = match u.normalized_to(c) {
        Ok(u) => u,
        Err(_) => return best,
    };
    let e = match crate::functionals::energy(params, &u) {
        Ok(e) => e.energy,
        Err(_) => return best,
    };
    match best {
        Some((be, bu)) if be <= e => Some((be, bu)),
        _ => Some((e, u)),
    }
}

/// Superposition of eight plane waves on the shell `|ξ| = k₀` under a Gaussian envelope of
/// width `L/8`, with seeded directions and amplitudes.
fn random_start(params: &PhysicsParams, grid: &Arc<Grid>, c: f64, seed: u64) -> Field {
    let k0 = shell_wavenumber(params);
    let dim = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<([f64; MAX_DIM], Complex64)> = (0..8)
        .map(|_| {
            let mut dir = [0.0; MAX_DIM];
            loop {
                for d in dir.iter_mut().take(dim) {
                    *d = rng.gen_range(-1.0..1.0);
                }
                let n: f64 = dir[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
                if n > 1e-3 && n <= 1.0 {
                    dir[..dim].iter_mut().for_each(|v| *v *= k0 / n);
                    break;
                }
            }
            let amp = Complex64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..2.0 * PI));
            (dir, amp)
        })
        .collect();
    let w = grid.half_length() / 8.0;
    let u = Field::from_fn(grid.clone(), |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let env = (-r2 / (2.0 * w * w)).exp();
        let sum: Complex64 = waves
            .iter()
            .map(|(k, a)| {
                let phase: f64 = k[..dim].iter().zip(x).map(|(k, x)| k * x).sum();
                a * Complex64::from_polar(1.0, phase)
            })
            .sum();
        sum * env
    });
    u.normalized_to(c).unwrap_or_else(|_| {
        Field::from_fn(grid.clone(), |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new((-r2 / (2.0 * w * w)).exp(), 0.0)
        })
        .normalized_to(c)
        .expect("nonzero envelope")
    })
}

// ---------------------------------------------------------------------------------------
// Flow

/// Accepted steps without a 1% residual improvement before the flow gives up.
const STALL_WINDOW: usize = 500;

struct FlowOutcome {
    energy: f64,
    iterations: usize,
    residual: f64,
    converged: bool,
    init: InitKind,
    history: Vec<f64>,
}

struct Flow<'a> {
    params: &'a PhysicsParams,
    grid: &'a Arc<Grid>,
    c: f64,
    opts: &'a SolveOptions,
    symbol: Vec<f64>,
    keep: Option<Vec<bool>>,
}

/// Energy terms of a physical sample together with its unnormalized DFT.
struct State {
    u: Vec<Complex64>,
    spec: Vec<Complex64>,
    terms: Terms,
    energy: f64,
}

impl<'a> Flow<'a> {
    fn new(params: &'a PhysicsParams, grid: &'a Arc<Grid>, c: f64, opts: &'a SolveOptions) -> Self {
        let symbol = grid
            .xi_sq()
            .iter()
            .map(|&k2| params.gamma * k2 * k2 - params.beta * k2)
            .collect();
        let keep = opts.dealias.then(|| {
            let m = grid.points_per_axis() as i64;
            let d = grid.dim();
            let mut idx = [0usize; MAX_DIM];
            (0..grid.len())
                .map(|flat| {
                    grid.unflatten(flat, &mut idx[..d]);
                    idx[..d]
                        .iter()
                        .all(|&q| 3 * crate::grid::signed_index(q, m as usize).abs() <= m)
                })
                .collect()
        });
        Flow {
            params,
            grid,
            c,
            opts,
            symbol,
            keep,
        }
    }

    fn state(&self, u: Vec<Complex64>) -> State {
        let g = self.grid;
        let mut spec = u.clone();
        g.fft_all(&mut spec, false);
        let dv = g.cell_volume();
        let inv_len = 1.0 / g.len() as f64;
        let p = self.params.p();
        let mut mass = 0.0;
        let mut lp = 0.0;
        for v in &u {
            let a2 = v.norm_sqr();
            mass += a2;
            lp += a2.powf(0.5 * p);
        }
        let mut grad = 0.0;
        let mut lap = 0.0;
        for (f, &k2) in spec.iter().zip(g.xi_sq()) {
            let a2 = f.norm_sqr();
            grad += k2 * a2;
            lap += k2 * k2 * a2;
        }
        let terms = Terms {
            mass: mass * dv,
            grad_sq: grad * dv * inv_len,
            lap_sq: lap * dv * inv_len,
            lp: lp * dv,
        };
        let pr = self.params;
        let energy = 0.5 * pr.gamma * terms.lap_sq - 0.5 * pr.beta * terms.grad_sq - pr.alpha / p * terms.lp;
        State { u, spec, terms, energy }
    }

    /// Preconditioned projected gradient `d̂` (DFT coefficients) and `‖d‖/‖u‖`.
    fn direction(&self, s: &State) -> (Vec<Complex64>, f64) {
        let pr = self.params;
        let g = self.grid;
        let sigma = pr.sigma;
        let mut force: Vec<Complex64> = s
            .u
            .iter()
            .map(|v| v * (pr.alpha * v.norm_sqr().powf(sigma)))
            .collect();
        g.fft_all(&mut force, false);
        if let Some(keep) = &self.keep {
            for (f, k) in force.iter_mut().zip(keep) {
                if !k {
                    *f = Complex64::new(0.0, 0.0);
                }
            }
        }
        let lambda = lambda_from_terms(pr, &s.terms);
        let bottom = pr.spectral_bottom();
        let mu = (lambda - bottom).max(1e-10 * bottom);
        let r2 = pr.shell_radius_sq();
        let precond = |k2: f64| match self.opts.preconditioner {
            Preconditioner::Biharmonic => 1.0 / (pr.gamma * (k2 - r2) * (k2 - r2) + mu),
            Preconditioner::None => 1.0,
        };
        let mut pg = Vec::with_capacity(s.spec.len());
        let mut pu = Vec::with_capacity(s.spec.len());
        let (mut num, mut den) = (0.0, 0.0);
        for (((f, n), &sym), &k2) in s.spec.iter().zip(&force).zip(&self.symbol).zip(g.xi_sq()) {
            let p = precond(k2);
            let grad = f * sym - n;
            let a = grad * p;
            let b = f * p;
            num += (f.conj() * a).re;
            den += (f.conj() * b).re;
            pg.push(a);
            pu.push(b);
        }
        let theta = num / den;
        let mut dn = 0.0;
        let mut un = 0.0;
        for ((a, b), f) in pg.iter_mut().zip(&pu).zip(&s.spec) {
            *a -= b * theta;
            dn += a.norm_sqr();
            un += f.norm_sqr();
        }
        (pg, (dn / un).sqrt())
    }

    fn retract(&self, s: &State, d: &[Complex64], h: f64) -> Option<Vec<Complex64>> {
        let g = self.grid;
        let mut w: Vec<Complex64> = s.spec.iter().zip(d).map(|(f, d)| f - d * h).collect();
        g.fft_all(&mut w, true);
        let norm2: f64 = w.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.cell_volume() / (g.len() as f64).powi(2);
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return None;
        }
        let scale = (self.c / norm2).sqrt() / g.len() as f64;
        w.iter_mut().for_each(|v| *v *= scale);
        Some(w)
    }

    fn run(&self, u0: Field, init: InitKind) -> (FlowOutcome, Field) {
        let mut s = self.state(u0.to_physical().into_values());
        let mut h = self.opts.step_size.min(self.opts.max_step);
        let mut history = Vec::new();
        if self.opts.record_history {
            history.push(s.energy);
        }
        let mut iterations = 0;
        let mut converged = false;
        let mut residual = f64::INFINITY;
        let mut best_residual = f64::INFINITY;
        let mut best_at = 0;
        while iterations < self.opts.max_iterations {
            let (d, res) = self.direction(&s);
            residual = res;
            if res < self.opts.tol_gradient {
                converged = true;
                break;
            }
            if res < 0.99 * best_residual {
                best_residual = res;
                best_at = iterations;
            } else if iterations - best_at > STALL_WINDOW {
                break;
            }
            let t = &s.terms;
            let slack = 8.0
                * f64::EPSILON
                * (self.params.gamma * t.lap_sq + self.params.beta * t.grad_sq + self.params.alpha * t.lp);
            let mut accepted = None;
            for _ in 0..60 {
                if let Some(w) = self.retract(&s, &d, h) {
                    let trial = self.state(w);
                    if trial.energy <= s.energy + slack {
                        accepted = Some(trial);
                        break;
                    }
                }
                h *= 0.5;
            }
            match accepted {
                Some(next) => {
                    s = next;
                    iterations += 1;
                    h = (1.3 * h).min(self.opts.max_step);
                    if self.opts.record_history {
                        history.push(s.energy);
                    }
                }
                None => break,
            }
        }
        if !converged {
            let (_, res) = self.direction(&s);
            residual = res;
            converged = res < self.opts.tol_gradient;
        }
        let field = Field::new(self.grid.clone(), Representation::Physical, s.u).expect("grid-sized");
        (
            FlowOutcome {
                energy: s.energy,
                iterations,
                residual,
                converged,
                init,
                history,
            },
            field,
        )
    }
}
