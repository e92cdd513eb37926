use std::f64::consts::PI;
use std::sync::Arc;

use mixdisp::families::*;
use mixdisp::special::bessel_j;
use mixdisp::{energy, localization_fraction, rayleigh_r, Complex64, Field, Grid, GridSpec, PhysicsParams};

fn grid(dim: usize, l: f64, m: usize) -> Arc<Grid> {
    Grid::new(GridSpec::new(dim, l, m).unwrap()).unwrap()
}

#[test]
fn half_order_bessel_closed_form() {
    let mut worst: f64 = 0.0;
    for i in 1..=50_000 {
        let t = i as f64 * 1e-3;
        let want = (2.0 / (PI * t)).sqrt() * t.sin();
        worst = worst.max((bessel_j(0.5, t).unwrap() - want).abs());
    }
    assert!(worst < 1e-10, "max error {worst:e}");
}

#[test]
fn bessel_values_at_origin() {
    assert_eq!(bessel_j(0.0, 0.0).unwrap().round(), 1.0);
    for nu in [0.5, 1.0, 2.5, 7.0] {
        assert_eq!(bessel_j(nu, 0.0).unwrap(), 0.0);
    }
}

#[test]
fn bessel_derivative_identity() {
    let h = 1e-5;
    for nu in [0.0, 0.5, 1.0, 2.0, 3.5] {
        let mut t = 0.5;
        while t <= 50.0 {
            let fd = (bessel_j(nu, t + h).unwrap() - bessel_j(nu, t - h).unwrap()) / (2.0 * h);
            let id = -bessel_j(nu + 1.0, t).unwrap() + nu / t * bessel_j(nu, t).unwrap();
            assert!((fd - id).abs() < 1e-6, "nu={nu} t={t}");
            t += 0.173;
        }
    }
}

#[test]
fn psi_origin_values() {
    assert!((psi_profile(3, &[0.0, 0.0, 0.0]).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-10);
    assert!((psi_profile(4, &[0.0; 4]).unwrap() - 0.5).abs() < 1e-10);
    assert!((psi_profile_1d(0.0, Psi1d::Even) - (2.0 / PI).sqrt()).abs() < 1e-15);
    assert_eq!(psi_profile_1d(0.0, Psi1d::Odd), 0.0);
}

/// `‖(Δ+1)ψ_m‖ / ‖ψ_m‖` restricted to `|x| < m − 2`, with the Laplacian taken spectrally.
fn interior_residual(g: &Arc<Grid>, m: f64) -> f64 {
    let u = bessel_family(1.0, m, g).unwrap();
    let r = u.apply_multiplier(|k2| 1.0 - k2).to_physical();
    let d = g.dim();
    let mut x = [0.0; 4];
    let (mut num, mut den) = (0.0, 0.0);
    for (flat, (a, b)) in r.values().iter().zip(u.to_physical().values()).enumerate() {
        g.point(flat, &mut x[..d]);
        if x[..d].iter().map(|v| v * v).sum::<f64>().sqrt() < m - 2.0 {
            num += a.norm_sqr();
            den += b.norm_sqr();
        }
    }
    (num / den).sqrt()
}

#[test]
fn psi_solves_helmholtz_on_default_grids() {
    for dim in 1..=3 {
        let g = Grid::new(GridSpec::default_for_dim(dim)).unwrap();
        let res = interior_residual(&g, 16.0);
        assert!(res < 1e-4, "N={dim}: {res:e}");
    }
}

#[test]
fn gaussian_mass_and_lp_on_grid() {
    for (dim, sigma) in [(1usize, 1.0), (1, 0.5), (2, 1.0)] {
        let p = PhysicsParams::normalized(1.0, sigma, dim).unwrap();
        for tau in [0.5, 1.0] {
            let g = Grid::new(gaussian_grid(dim, tau).unwrap()).unwrap();
            let u = gaussian_family(0.8, tau, &g).unwrap();
            assert!((u.mass() - 0.8).abs() < 1e-8);
            let cf = gaussian_closed_form(&p, 0.8, tau).unwrap();
            let lp = u.lp_norm(p.p()).unwrap();
            assert!((lp - cf.lp).abs() < 1e-6 * cf.lp);
            let quad = u.spectral_integral(|k2| (1.0 - k2) * (1.0 - k2));
            assert!((quad - cf.quadratic).abs() < 1e-6 * cf.quadratic, "N={dim} tau={tau}");
        }
    }
}

#[test]
fn gaussian_power_laws() {
    let p = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
    let taus = [0.1, 0.2, 0.3, 0.5];
    let (mut quad, mut nl) = (Vec::new(), Vec::new());
    for &tau in &taus {
        let g = Grid::new(gaussian_grid(1, tau).unwrap()).unwrap();
        let u = gaussian_family(1.0, tau, &g).unwrap();
        quad.push(u.spectral_integral(|k2| (1.0 - k2) * (1.0 - k2)));
        nl.push(u.lp_norm(p.p()).unwrap());
    }
    let fq = fit_bound(FamilyKind::GaussianTau, &taus, &quad).unwrap();
    let fn_ = fit_bound(FamilyKind::GaussianTau, &taus, &nl).unwrap();
    assert!((fq.fitted_slope - 4.0).abs() < 0.1, "{}", fq.fitted_slope);
    assert!((fn_.fitted_slope - 2.0).abs() < 0.05, "{}", fn_.fitted_slope);
}

#[test]
fn gaussian_witness_whenever_below_threshold() {
    for (dim, sigma) in [(1usize, 1.0), (1, 1.9), (2, 1.0), (2, 1.3), (3, 0.9), (4, 0.7)] {
        let p = PhysicsParams::normalized(1.0, sigma, dim).unwrap();
        let w = gaussian_witness(&p, 1.0, 400).unwrap();
        let w = w.unwrap_or_else(|| panic!("no witness for N={dim} sigma={sigma}"));
        assert!(w.phi < 0.0 && w.tau <= 1.0);
    }
}

#[test]
fn bessel_n4_scaling() {
    let ms = [8.0, 16.0, 32.0, 64.0];
    let norms: Vec<BesselNorms> = ms.iter().map(|&m| bessel_radial_norms(4, m, 3.0).unwrap()).collect();
    let mass: Vec<f64> = norms.iter().map(|b| b.mass).collect();
    let lap: Vec<f64> = norms.iter().map(|b| b.lap_plus_one_sq).collect();
    let lp: Vec<f64> = norms.iter().map(|b| b.lp).collect();
    let f1 = fit_bound(FamilyKind::BesselM, &ms, &mass).unwrap();
    let f2 = fit_bound(FamilyKind::BesselM, &ms, &lap).unwrap();
    let f3 = fit_bound(FamilyKind::BesselM, &ms, &lp).unwrap();
    assert!((f1.fitted_slope - 1.0).abs() < 0.15, "{}", f1.fitted_slope);
    assert!((f2.fitted_slope + 1.0).abs() < 0.25, "{}", f2.fitted_slope);
    assert!(f3.fitted_slope >= 0.0 && f3.fitted_intercept.exp() > 0.0);
}

#[test]
fn bessel_witness_n4() {
    let p = PhysicsParams::normalized(1.0, 0.5, 4).unwrap();
    let w = bessel_witness(&p, 1.0, 12).unwrap().expect("witness m");
    assert!(w.phi < 0.0);
    assert!((bessel_phi(&p, 1.0, w.m).unwrap() - w.phi).abs() < 1e-15);
}

#[test]
fn bessel_lp_growth_by_dimension() {
    let ms = [8.0, 16.0, 32.0, 64.0];
    let lp = |dim: usize| -> Vec<f64> { ms.iter().map(|&m| bessel_radial_norms(dim, m, 4.0).unwrap().lp).collect() };
    let s1 = fit_bound(FamilyKind::BesselM, &ms, &lp(1)).unwrap().fitted_slope;
    assert!((s1 - 1.0).abs() < 0.05, "N=1 slope {s1}");
    let l2 = lp(2);
    assert!(l2.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn bump_sequence_vanishes() {
    let p = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
    let mut r_prev = 0.0;
    let mut loc_prev = f64::INFINITY;
    let mut last_i = 0.0;
    for n in [4u32, 16, 64] {
        let g = Grid::new(bump_grid(1, n).unwrap()).unwrap();
        let u = bump_family(1.0, n, &g).unwrap();
        assert!((u.mass() - 1.0).abs() < 1e-10);
        let r = rayleigh_r(&u).unwrap();
        assert!(r > r_prev);
        r_prev = r;
        let loc = localization_fraction(&u, 10.0).unwrap();
        assert!(loc < loc_prev);
        loc_prev = loc;
        last_i = energy(&p, &u).unwrap().quadratic;
    }
    assert!(r_prev > 0.999);
    assert!((last_i + 1.0).abs() < 0.01);
}

#[test]
fn bessel_family_on_grid_matches_requested_mass() {
    let g = grid(2, 16.0 * PI, 128);
    for m in [1.0, 4.0, 12.0] {
        let u = bessel_family(2.5, m, &g).unwrap();
        assert!((u.mass() - 2.5).abs() < 1e-10);
    }
    let raw = Field::from_fn(g.clone(), |x| {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        Complex64::new(psi_radial(2, r) * cutoff(r / 4.0), 0.0)
    });
    let u = bessel_family(1.0, 4.0, &g).unwrap();
    let scaled = raw.normalized_to(1.0).unwrap();
    assert!(u.relative_distance(&scaled).unwrap() < 1e-14);
}
