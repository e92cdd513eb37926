use std::f64::consts::PI;
use std::sync::Arc;

use mixdisp::families::{
    bessel_radial_norms, bessel_witness, bump_family, bump_grid, fit_bound, gaussian_closed_form, gaussian_family,
    gaussian_grid, gaussian_witness, psi_profile, FamilyKind,
};
use mixdisp::gn::{critical_mass, estimate_bn, unbounded_witness, GnOptions};
use mixdisp::special::bessel_j;
use mixdisp::{
    amplitude_scale, dilate, energy, fourier_symmetrize, lagrange_multiplier, lagrange_multiplier_from_energy,
    minimize_on_sphere, rayleigh_r, Classification, Field, Grid, GridSpec, PhysicsParams, SolveOptions,
};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<String, String>;
type CheckFn = fn(u64) -> Outcome;

fn grid(dim: usize, l: f64, m: usize) -> Arc<Grid> {
    Grid::new(GridSpec::new(dim, l, m).expect("static grid")).expect("static grid")
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fields(seed: u64, count: u64) -> impl Iterator<Item = Field> {
    (0..count).map(move |i| {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i);
        let kmax = 0.8 + (i % 9) as f64 * 0.6;
        if i % 2 == 0 {
            Field::random_band_limited(grid(1, 20.0, 128), kmax, s)
        } else {
            Field::random_band_limited(grid(2, 6.0, 32), kmax, s)
        }
    })
}

fn normalized(sigma: f64, dim: usize) -> PhysicsParams {
    PhysicsParams::normalized(1.0, sigma, dim).expect("admissible")
}

fn round_trip(seed: u64) -> Outcome {
    let worst = fields(seed, 40)
        .map(|f| f.to_physical().to_frequency().relative_distance(&f).unwrap())
        .fold(0.0, f64::max);
    ensure(worst < 1e-12, format!("max error {worst:.1e}"))
}

fn plancherel(seed: u64) -> Outcome {
    let worst = fields(seed, 40)
        .map(|f| {
            let g = f.grid().clone();
            let a: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / g.volume();
            let b: f64 = f.to_physical().values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.cell_volume();
            (a - b).abs() / b
        })
        .fold(0.0, f64::max);
    ensure(worst < 1e-12, format!("max error {worst:.1e}"))
}

fn interpolation(seed: u64) -> Outcome {
    let bad = fields(seed, 200)
        .filter(|f| {
            let n = f.norms();
            n.grad_sq > (n.lap_sq * n.mass).sqrt() * (1.0 + 1e-10)
        })
        .count();
    ensure(bad == 0, format!("{bad} violations / 200"))
}

fn rayleigh_bound(seed: u64) -> Outcome {
    let worst = fields(seed, 200).map(|f| rayleigh_r(&f).unwrap()).fold(0.0, f64::max);
    ensure(worst <= 1.0 + 1e-10, format!("max R = {worst:.12}"))
}

fn quadratic_lower_bound(seed: u64) -> Outcome {
    let p = normalized(1.0, 2);
    let worst = fields(seed, 100)
        .filter(|f| f.grid().dim() == 2)
        .map(|f| {
            let e = energy(&p, &f).unwrap();
            e.quadratic / e.mass
        })
        .fold(f64::INFINITY, f64::min);
    ensure(worst >= -p.spectral_bottom() * (1.0 + 1e-12), format!("min Q/c = {worst:.6}"))
}

fn translation(seed: u64) -> Outcome {
    let p = normalized(1.0, 2);
    let mut worst: f64 = 0.0;
    for (i, f) in fields(seed, 20).filter(|f| f.grid().dim() == 2).enumerate() {
        let v = f.to_physical().cyclic_shift(&[i as isize + 3, -(i as isize) - 1]);
        let (a, b) = (energy(&p, &f).unwrap(), energy(&p, &v).unwrap());
        worst = worst.max((a.energy - b.energy).abs() / (a.lap_term + a.mass));
    }
    ensure(worst < 1e-10, format!("max relative change {worst:.1e}"))
}

fn dilation_law(_: u64) -> Outcome {
    let p = PhysicsParams::new(1.5, 2.5, 0.7, 0.8, 1).unwrap();
    let u = Field::from_fn(grid(1, 30.0, 256), |x| {
        mixdisp::Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), x[0])
    });
    let e1 = energy(&p, &u).unwrap();
    let mut worst: f64 = 0.0;
    for s in [0.25, 0.5, 2.0] {
        let es = energy(&p, &dilate(&u, s).map_err(|e| e.to_string())?).unwrap();
        let want = s * s * e1.lap_term - s * e1.grad_term - s.powf(p.sigma_n() / 2.0) * e1.nonlinear_term;
        worst = worst.max((es.energy - want).abs() / want.abs());
    }
    ensure(worst < 1e-6, format!("max relative error {worst:.1e}"))
}

fn multiplier_routes(seed: u64) -> Outcome {
    let p = normalized(1.0, 2);
    let mut worst: f64 = 0.0;
    for f in fields(seed, 20).filter(|f| f.grid().dim() == 2) {
        let a = lagrange_multiplier(&p, &f).unwrap();
        let b = lagrange_multiplier_from_energy(&p, &f).unwrap();
        worst = worst.max((a - b).abs() / a.abs().max(1.0));
    }
    ensure(worst < 1e-10, format!("max difference {worst:.1e}"))
}

fn amplitude(seed: u64) -> Outcome {
    let p = normalized(1.0, 1);
    let bad = fields(seed, 40)
        .filter(|f| f.grid().dim() == 1)
        .filter(|f| {
            let a = energy(&p, f).unwrap().energy;
            let b = energy(&p, &amplitude_scale(f, 2.0).unwrap()).unwrap().energy;
            b / 2.0 >= a
        })
        .count();
    ensure(bad == 0, format!("{bad} violations"))
}

fn sym_norms(seed: u64) -> Outcome {
    let mut worst: f64 = 0.0;
    for f in fields(seed, 100) {
        let (a, b) = (f.norms(), fourier_symmetrize(&f).norms());
        for (x, y) in [(a.mass, b.mass), (a.grad_sq, b.grad_sq), (a.lap_sq, b.lap_sq)] {
            worst = worst.max((x - y).abs() / x);
        }
    }
    ensure(worst < 1e-10, format!("max relative change {worst:.1e}"))
}

fn sym_l4(seed: u64) -> Outcome {
    let bad = fields(seed, 100)
        .filter(|f| fourier_symmetrize(f).lp_norm(4.0).unwrap() < f.lp_norm(4.0).unwrap() * (1.0 - 1e-12))
        .count();
    ensure(bad == 0, format!("{bad} decreases"))
}

fn sym_idempotent(seed: u64) -> Outcome {
    let worst = fields(seed, 100)
        .map(|f| {
            let q = fourier_symmetrize(&f);
            fourier_symmetrize(&q).relative_distance(&q).unwrap()
        })
        .fold(0.0, f64::max);
    ensure(worst < 1e-10, format!("max distance {worst:.1e}"))
}

fn bessel_half(_: u64) -> Outcome {
    let worst = (1..=5000)
        .map(|i| {
            let t = i as f64 * 0.01;
            (bessel_j(0.5, t).unwrap() - (2.0 / (PI * t)).sqrt() * t.sin()).abs()
        })
        .fold(0.0, f64::max);
    ensure(worst < 1e-10, format!("max error {worst:.1e}"))
}

fn bessel_derivative(_: u64) -> Outcome {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for nu in [0.0, 1.0, 2.5] {
        for i in 0..300 {
            let t = 0.5 + i as f64 * 0.165;
            let fd = (bessel_j(nu, t + h).unwrap() - bessel_j(nu, t - h).unwrap()) / (2.0 * h);
            let id = nu / t * bessel_j(nu, t).unwrap() - bessel_j(nu + 1.0, t).unwrap();
            worst = worst.max((fd - id).abs());
        }
    }
    ensure(worst < 1e-6, format!("max error {worst:.1e}"))
}

fn psi_origin(_: u64) -> Outcome {
    let a = (psi_profile(3, &[0.0; 3]).unwrap() - (2.0 / PI).sqrt()).abs();
    let b = (psi_profile(4, &[0.0; 4]).unwrap() - 0.5).abs();
    ensure(a < 1e-10 && b < 1e-10, format!("errors {a:.1e}, {b:.1e}"))
}

fn gaussian_grid_match(_: u64) -> Outcome {
    let p = normalized(1.0, 1);
    let mut worst: f64 = 0.0;
    for tau in [0.5, 1.0] {
        let u = gaussian_family(1.0, tau, &Grid::new(gaussian_grid(1, tau).unwrap()).unwrap()).unwrap();
        let phi = energy(&p, &u).unwrap().phi;
        let cf = gaussian_closed_form(&p, 1.0, tau).unwrap().phi;
        worst = worst.max((phi - cf).abs() / cf.abs());
    }
    ensure(worst < 1e-6, format!("max relative error {worst:.1e}"))
}

fn gaussian_witness_check(_: u64) -> Outcome {
    let w = gaussian_witness(&normalized(1.0, 1), 1.0, 60).unwrap();
    ensure(w.is_some_and(|w| w.tau <= 0.25 && w.phi < 0.0), format!("{w:?}"))
}

fn gaussian_slopes(_: u64) -> Outcome {
    let p = normalized(1.0, 1);
    let taus = [0.05, 0.1, 0.2, 0.3];
    let t: Vec<_> = taus.iter().map(|&tau| gaussian_closed_form(&p, 1.0, tau).unwrap()).collect();
    let q = fit_bound(FamilyKind::GaussianTau, &taus, &t.iter().map(|x| x.quadratic).collect::<Vec<_>>()).unwrap();
    let l = fit_bound(FamilyKind::GaussianTau, &taus, &t.iter().map(|x| x.lp).collect::<Vec<_>>()).unwrap();
    ensure(
        (q.fitted_slope - 4.0).abs() < 0.1 && (l.fitted_slope - 2.0).abs() < 0.05,
        format!("slopes {:.4}, {:.4}", q.fitted_slope, l.fitted_slope),
    )
}

fn bessel_slopes(_: u64) -> Outcome {
    let ms = [8.0, 16.0, 32.0, 64.0];
    let n: Vec<_> = ms.iter().map(|&m| bessel_radial_norms(4, m, 3.0).unwrap()).collect();
    let a = fit_bound(FamilyKind::BesselM, &ms, &n.iter().map(|b| b.mass).collect::<Vec<_>>()).unwrap();
    let b = fit_bound(FamilyKind::BesselM, &ms, &n.iter().map(|b| b.lap_plus_one_sq).collect::<Vec<_>>()).unwrap();
    ensure(
        (a.fitted_slope - 1.0).abs() < 0.15 && (b.fitted_slope + 1.0).abs() < 0.25,
        format!("slopes {:.4}, {:.4}", a.fitted_slope, b.fitted_slope),
    )
}

fn bessel_witness_check(_: u64) -> Outcome {
    let w = bessel_witness(&normalized(0.5, 4), 1.0, 12).unwrap();
    ensure(w.is_some_and(|w| w.phi < 0.0), format!("{w:?}"))
}

fn bump_limit(_: u64) -> Outcome {
    let p = normalized(1.0, 1);
    let mut rs = Vec::new();
    let mut last = 0.0;
    for n in [4, 16, 64] {
        let u = bump_family(1.0, n, &Grid::new(bump_grid(1, n).unwrap()).unwrap()).unwrap();
        rs.push(rayleigh_r(&u).unwrap());
        last = energy(&p, &u).unwrap().quadratic;
    }
    ensure(
        rs.windows(2).all(|w| w[1] > w[0]) && (last + 1.0).abs() < 0.01,
        format!("I/c = {last:.6}, R = {rs:.6?}"),
    )
}

fn solver_run(c: f64) -> mixdisp::MinimizeReport {
    let p = normalized(1.0, 1);
    minimize_on_sphere(&p, &grid(1, 128.0 * PI, 2048), c, &SolveOptions::default()).unwrap().0
}

fn solver_found(_: u64) -> Outcome {
    let r = solver_run(1.0);
    ensure(
        r.classification == Classification::MinimizerFound && r.margin < 0.0 && r.lambda_hat > 2.0,
        format!("{}: margin {:.3e}, lambda {:.6}", r.classification, r.margin, r.lambda_hat),
    )
}

fn solver_pohozaev(_: u64) -> Outcome {
    let r = solver_run(1.0);
    ensure(r.pohozaev_residual < 1e-5, format!("residual {:.1e}", r.pohozaev_residual))
}

fn solver_scaling(_: u64) -> Outcome {
    let (a, b) = (solver_run(0.5), solver_run(1.0));
    ensure(
        b.m_hat <= 2.0 * a.m_hat + b.tol_margin && a.m_hat < 0.0,
        format!("m(0.5) = {:.8}, m(1) = {:.8}", a.m_hat, b.m_hat),
    )
}

fn vanishing(_: u64) -> Outcome {
    let p = PhysicsParams::normalized(0.01, 1.0, 1).unwrap();
    let g = Grid::new(GridSpec::default_for_dim(1)).unwrap();
    let r = minimize_on_sphere(&p, &g, 1.0, &SolveOptions::default()).unwrap().0;
    ensure(
        r.classification == Classification::VanishingSuspected,
        format!("{}: localization {:.3}", r.classification, r.localization),
    )
}

fn supercritical(_: u64) -> Outcome {
    let e = PhysicsParams::normalized(1.0, 5.0, 1).err().map(|e| e.to_string()).unwrap_or_default();
    ensure(e.contains("0 < sigma*N < 4"), e)
}

fn gn_critical(seed: u64) -> Outcome {
    let g = Grid::new(mixdisp::gn::gn_default_grid(1)).unwrap();
    let (r, u) = estimate_bn(4.0, &g, &GnOptions { seed, ..GnOptions::default() }).map_err(|e| e.to_string())?;
    let p = normalized(4.0, 1);
    let c = critical_mass(&p, &r).unwrap().c_star.unwrap();
    let direct = (5.0 * p.gamma / (p.alpha * r.b_n)).powf(0.25);
    let s = [1.0, 2.0, 4.0, 8.0];
    let above = unbounded_witness(&p, 1.1 * c, &u, &s).unwrap();
    let below = unbounded_witness(&p, 0.9 * c, &u, &s).unwrap();
    ensure(
        r.spread < 0.01
            && (c - direct).abs() <= 1e-12 * c
            && above.windows(2).all(|w| w[1] < w[0])
            && above[3] < above[0] - 1.0
            && below[3] > below[2],
        format!("B = {:.10}, spread {:.1e}, c* = {c:.6}", r.b_n, r.spread),
    )
}

fn critical_scaling(_: u64) -> Outcome {
    let r = mixdisp::GnReport {
        sigma: 4.0,
        dim: 1,
        b_n: 0.0628,
        c_n: None,
        c_star: None,
        start_values: vec![0.0628],
        spread: 0.0,
        iterations: vec![0],
    };
    let p = normalized(4.0, 1);
    let a = critical_mass(&p, &r).unwrap().c_star.unwrap();
    let b = critical_mass(&p.with_gamma(4.0).unwrap(), &r).unwrap().c_star.unwrap();
    let ratio = b / a;
    ensure((ratio - 2f64.powf(0.25)).abs() < 1e-12, format!("ratio {ratio:.15}"))
}

const CHECKS: &[(&str, CheckFn)] = &[
    ("transform_round_trip", round_trip),
    ("plancherel", plancherel),
    ("interpolation_inequality", interpolation),
    ("rayleigh_at_most_one", rayleigh_bound),
    ("quadratic_lower_bound", quadratic_lower_bound),
    ("translation_invariance", translation),
    ("dilation_scaling_law", dilation_law),
    ("lagrange_multiplier_routes", multiplier_routes),
    ("amplitude_scaling_strict", amplitude),
    ("symmetrization_norms", sym_norms),
    ("symmetrization_l4_increase", sym_l4),
    ("symmetrization_idempotent", sym_idempotent),
    ("bessel_half_order", bessel_half),
    ("bessel_derivative_identity", bessel_derivative),
    ("psi_origin_values", psi_origin),
    ("gaussian_grid_vs_closed_form", gaussian_grid_match),
    ("gaussian_witness", gaussian_witness_check),
    ("gaussian_power_laws", gaussian_slopes),
    ("bessel_n4_power_laws", bessel_slopes),
    ("bessel_witness_n4", bessel_witness_check),
    ("bump_family_limit", bump_limit),
    ("solver_minimizer_found", solver_found),
    ("solver_pohozaev", solver_pohozaev),
    ("solver_mass_scaling", solver_scaling),
    ("vanishing_small_alpha", vanishing),
    ("supercritical_rejected", supercritical),
    ("gn_critical_mass", gn_critical),
    ("critical_mass_gamma_scaling", critical_scaling),
];

pub fn run_all(seed: u64) -> Vec<Check> {
    CHECKS
        .par_iter()
        .map(|&(name, f)| {
            let (passed, detail) = match std::panic::catch_unwind(|| f(seed)) {
                Ok(Ok(d)) => (true, d),
                Ok(Err(d)) => (false, d),
                Err(_) => (false, "panicked".to_string()),
            };
            Check { name, passed, detail }
        })
        .collect()
}
