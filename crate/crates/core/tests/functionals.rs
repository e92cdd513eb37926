use std::f64::consts::PI;
use std::sync::Arc;

use mixdisp::families::{gaussian_closed_form, gaussian_family, gaussian_grid};
use mixdisp::{
    amplitude_scale, dilate, energy, fourier_symmetrize, lagrange_multiplier, lagrange_multiplier_from_energy,
    pohozaev_residual, quadratic_ray_minimum, rayleigh_r, Complex64, Field, Grid, GridSpec, PhysicsParams,
};
use proptest::prelude::*;

fn grid(dim: usize, l: f64, m: usize) -> Arc<Grid> {
    Grid::new(GridSpec::new(dim, l, m).unwrap()).unwrap()
}

fn carrier_gaussian(g: Arc<Grid>) -> Field {
    Field::from_fn(g, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::from_polar((-r2 / 2.0).exp(), x[0])
    })
}

#[test]
fn gaussian_member_terms() {
    let p = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
    let g = Grid::new(gaussian_grid(1, 1.0).unwrap()).unwrap();
    let e = energy(&p, &gaussian_family(1.0, 1.0, &g).unwrap()).unwrap();
    assert!((e.nonlinear_term - 0.25 / (2.0 * PI).sqrt()).abs() < 1e-8);
    assert!((e.phi + e.nonlinear_term - 2.75).abs() < 1e-8);
    let cf = gaussian_closed_form(&p, 1.0, 1.0).unwrap();
    assert!((e.phi - cf.phi).abs() < 1e-8);
}

#[test]
fn dilation_matches_scaling_law() {
    let p = PhysicsParams::new(1.5, 2.5, 0.7, 0.8, 1).unwrap();
    let u = carrier_gaussian(grid(1, 30.0, 256));
    let e1 = energy(&p, &u).unwrap();
    for s in [0.25, 0.5, 2.0] {
        let es = energy(&p, &dilate(&u, s).unwrap()).unwrap();
        let want = s * s * e1.lap_term - s * e1.grad_term - s.powf(p.sigma_n() / 2.0) * e1.nonlinear_term;
        assert!((es.energy - want).abs() < 1e-6 * want.abs(), "s={s}: {} vs {want}", es.energy);
    }
}

#[test]
fn dilation_ray_energy_tends_to_zero_from_below() {
    let p = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
    let u = carrier_gaussian(grid(1, 60.0, 512));
    let mut prev = f64::NEG_INFINITY;
    for k in 2..=6 {
        let s = 2f64.powi(-k);
        let e = energy(&p, &dilate(&u, s).unwrap()).unwrap().energy;
        assert!(e < 0.0, "E(u_s) = {e} at s = {s}");
        assert!(e > prev);
        prev = e;
    }
}

#[test]
fn quadratic_ray_minimum_attained_at_optimal_dilation() {
    let p = PhysicsParams::normalized(1.0, 1.0, 2).unwrap();
    let u = Field::from_fn(grid(2, 12.0, 128), |x| {
        Complex64::new((-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp() * (1.3 * x[0]).cos(), 0.0)
    });
    let e = energy(&p, &u).unwrap();
    let s_star = e.grad_term / (2.0 * e.lap_term);
    let at = energy(&p, &dilate(&u, s_star).unwrap()).unwrap().quadratic;
    let want = quadratic_ray_minimum(&p, &u).unwrap();
    assert!((at - want).abs() < 1e-8 * want.abs());
}

#[test]
fn random_field_is_not_stationary() {
    let p = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
    let u = Field::random_band_limited(grid(1, 10.0, 64), 3.0, 5);
    assert!(pohozaev_residual(&p, &u).unwrap() > 0.0);
}

fn params() -> impl Strategy<Value = PhysicsParams> {
    (0.2f64..4.0, 0.2f64..6.0, 0.1f64..3.0, 0.1f64..1.9)
        .prop_map(|(g, b, a, s)| PhysicsParams::new(g, b, a, s, 2).unwrap())
}

fn random_field(seed: u64, kmax: f64) -> Field {
    Field::random_band_limited(grid(2, 6.0, 32), kmax, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_part_bounded_below(p in params(), seed in any::<u64>(), kmax in 0.6f64..8.0) {
        let u = random_field(seed, kmax);
        let e = energy(&p, &u).unwrap();
        prop_assume!(e.mass > 0.0);
        prop_assert!(e.quadratic / e.mass >= -p.spectral_bottom() * (1.0 + 1e-12));
        prop_assert!(e.lap_term >= 0.0 && e.grad_term >= 0.0 && e.nonlinear_term >= 0.0);
        prop_assert!((e.energy - (e.lap_term - e.grad_term - e.nonlinear_term)).abs() <= 1e-14 * e.lap_term.max(1.0));
        prop_assert!((e.phi - e.energy - p.threshold_slope() * e.mass).abs() <= 1e-10 * (e.lap_term + e.mass));
    }

    #[test]
    fn rayleigh_quotient_at_most_one(seed in any::<u64>(), kmax in 0.6f64..8.0) {
        let u = random_field(seed, kmax);
        prop_assume!(u.norms().lap_sq > 0.0);
        let r = rayleigh_r(&u).unwrap();
        prop_assert!(r > 0.0 && r <= 1.0 + 1e-10);
    }

    #[test]
    fn energy_translation_invariant(p in params(), seed in any::<u64>(), s0 in -16isize..16, s1 in -16isize..16) {
        let u = random_field(seed, 4.0).to_physical();
        let v = u.cyclic_shift(&[s0, s1]);
        let (a, b) = (energy(&p, &u).unwrap(), energy(&p, &v).unwrap());
        let scale = a.lap_term + a.grad_term + a.nonlinear_term + a.mass;
        prop_assert!((a.energy - b.energy).abs() < 1e-10 * scale);
        prop_assert!((a.quadratic - b.quadratic).abs() < 1e-10 * scale);
        prop_assert!((a.phi - b.phi).abs() < 1e-10 * scale);
        let (pa, pb) = (pohozaev_residual(&p, &u).unwrap(), pohozaev_residual(&p, &v).unwrap());
        prop_assert!((pa - pb).abs() < 1e-10 * pa.max(1.0));
    }

    #[test]
    fn multiplier_routes_agree(p in params(), seed in any::<u64>()) {
        let u = random_field(seed, 3.0);
        let a = lagrange_multiplier(&p, &u).unwrap();
        let b = lagrange_multiplier_from_energy(&p, &u).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn amplitude_scaling_strictly_lowers_energy_per_mass(p in params(), seed in any::<u64>(), tau in 1.01f64..5.0) {
        let u = random_field(seed, 3.0);
        let scaled = amplitude_scale(&u, tau).unwrap();
        let (a, b) = (energy(&p, &u).unwrap(), energy(&p, &scaled).unwrap());
        prop_assert!((b.mass - tau * a.mass).abs() < 1e-12 * b.mass);
        prop_assert!(b.energy / tau < a.energy);
        let ratio = b.nonlinear_term / a.nonlinear_term;
        prop_assert!((ratio - tau.powf(p.sigma + 1.0)).abs() < 1e-10 * ratio);
    }

    #[test]
    fn symmetrization_properties(seed in any::<u64>(), kmax in 0.6f64..8.0) {
        let u = random_field(seed, kmax);
        let q = fourier_symmetrize(&u);
        let (a, b) = (u.norms(), q.norms());
        prop_assert!((a.mass - b.mass).abs() <= 1e-10 * a.mass);
        prop_assert!((a.grad_sq - b.grad_sq).abs() <= 1e-10 * a.grad_sq.max(1e-300));
        prop_assert!((a.lap_sq - b.lap_sq).abs() <= 1e-10 * a.lap_sq.max(1e-300));
        prop_assert!(q.lp_norm(4.0).unwrap() >= u.lp_norm(4.0).unwrap() * (1.0 - 1e-12));
        prop_assert!(fourier_symmetrize(&q).relative_distance(&q).unwrap() < 1e-10);
    }
}
