//! Bessel functions of the first kind and Gauss-Legendre quadrature.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

fn switchover(nu: f64) -> f64 {
    f64::max(12.0, nu)
}

/// `J_ν(t)` for `ν ≥ 0`, `t ≥ 0`.
pub fn bessel_j(nu: f64, t: f64) -> Result<f64> {
    check(nu, t)?;
    if t < switchover(nu) {
        Ok(series(nu, t) * if t == 0.0 { if nu == 0.0 { 1.0 } else { 0.0 } } else { (0.5 * t).powf(nu) })
    } else {
        Ok(large_argument(nu, t))
    }
}

/// `t^{-ν} J_ν(t)`, continuous at `t = 0` with value `1/(2^ν Γ(ν+1))`.
pub fn bessel_j_scaled(nu: f64, t: f64) -> Result<f64> {
    check(nu, t)?;
    if t < switchover(nu) {
        Ok(series(nu, t) * 0.5f64.powf(nu))
    } else {
        Ok(large_argument(nu, t) / t.powf(nu))
    }
}

fn check(nu: f64, t: f64) -> Result<()> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!("Bessel order must be >= 0, got {nu}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("Bessel argument must be >= 0, got {t}")));
    }
    Ok(())
}

/// `Σ_k (−t²/4)^k / (k! Γ(k+ν+1))`, i.e. `J_ν(t) / (t/2)^ν`.
fn series(nu: f64, t: f64) -> f64 {
    let q = -0.25 * t * t;
    let mut term = (-ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Expansion for `ν < 2`, upward recurrence (stable for `t > ν`) beyond.
fn large_argument(nu: f64, t: f64) -> f64 {
    if nu < 2.0 {
        return hankel(nu, t);
    }
    let base = nu - nu.floor();
    let mut prev = hankel(base, t);
    let mut cur = hankel(base + 1.0, t);
    let mut order = base + 1.0;
    while order + 0.5 < nu {
        let next = 2.0 * order / t * cur - prev;
        prev = cur;
        cur = next;
        order += 1.0;
    }
    cur
}

/// Large-argument expansion, summed while the terms keep shrinking.
fn hankel(nu: f64, t: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    let mut a = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..200 {
        let term = a;
        if term.abs() > prev || term.abs() < 1e-17 {
            if term.abs() < 1e-17 {
                add(k, term, &mut p, &mut q);
            }
            break;
        }
        add(k, term, &mut p, &mut q);
        prev = term.abs();
        let kf = (k + 1) as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * t);
    }
    let chi = t - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * t)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn add(k: usize, term: f64, p: &mut f64, q: &mut f64) {
    match k % 4 {
        0 => *p += term,
        1 => *q += term,
        2 => *p -= term,
        _ => *q -= term,
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]` with unit-length panels
/// (at least one) of `order` points.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let panels = ((b - a).ceil() as usize).max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let mid = lo + 0.5 * h;
        total += x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + 0.5 * h * xi)).sum::<f64>() * 0.5 * h;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        assert!((bessel_j(0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(bessel_j(1.5, 0.0).unwrap(), 0.0);
        assert!((bessel_j_scaled(1.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(bessel_j(-1.0, 1.0).is_err());
        assert!(bessel_j(1.0, -1.0).is_err());
    }

    #[test]
    fn reference_values() {
        // J_0(1), J_1(10), J_0(100), J_2(30)
        let cases = [
            (0.0, 1.0, 0.765_197_686_557_966_6),
            (1.0, 10.0, 0.043_472_746_168_861_44),
            (0.0, 100.0, 0.019_985_850_304_223_12),
            (2.0, 30.0, 0.078_451_246_073_265_38),
        ];
        for (nu, t, want) in cases {
            let got = bessel_j(nu, t).unwrap();
            assert!((got - want).abs() < 1e-12, "J_{nu}({t}) = {got}, want {want}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((m - 2.0 / 19.0).abs() < 1e-14);
        let i = integrate(|t| t.sin(), 0.0, PI, 12);
        assert!((i - 2.0).abs() < 1e-13);
    }
}
