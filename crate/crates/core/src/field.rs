//! Complex fields sampled on a [`Grid`], with exact Fourier-multiplier norms.
//!
//! The frequency representation approximates the non-unitary transform
//! `û(ξ) = ∫ e^{-iξ·x} u(x) dx`, so that `‖u‖₂² = (2π)^{-N} ∫ |û|² dξ`. On the lattice the
//! `dξ` weight is `(π/L)^N`, and every frequency-side integral reduces to `(2L)^{-N} Σ_k`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Physical,
    Frequency,
}

/// The three quadratic norms the energy is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// `‖u‖₂²`
    pub mass: f64,
    /// `‖∇u‖₂²`
    pub grad_sq: f64,
    /// `‖Δu‖₂²`
    pub lap_sq: f64,
}

#[derive(Clone)]
pub struct Field {
    grid: Arc<Grid>,
    rep: Representation,
    values: Vec<Complex64>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("grid", self.grid.spec())
            .field("rep", &self.rep)
            .finish()
    }
}

impl Field {
    pub fn new(grid: Arc<Grid>, rep: Representation, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field { grid, rep, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Field {
            grid,
            rep: Representation::Physical,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn<F>(grid: Arc<Grid>, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let d = grid.dim();
        let mut x = [0.0; MAX_DIM];
        let values = (0..grid.len())
            .map(|flat| {
                grid.point(flat, &mut x[..d]);
                f(&x[..d])
            })
            .collect();
        Field {
            grid,
            rep: Representation::Physical,
            values,
        }
    }

    /// Builds a field from its frequency samples `û(ξ_k)`.
    pub fn from_spectrum_fn<F>(grid: Arc<Grid>, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let d = grid.dim();
        let mut xi = [0.0; MAX_DIM];
        let values = (0..grid.len())
            .map(|flat| {
                grid.wavevector(flat, &mut xi[..d]);
                f(&xi[..d])
            })
            .collect();
        Field {
            grid,
            rep: Representation::Frequency,
            values,
        }
    }

    /// Random field whose spectrum is supported on `|ξ| ≤ max_wavenumber`, with independent
    /// complex Gaussian coefficients. Deterministic in `seed`.
    pub fn random_band_limited(grid: Arc<Grid>, max_wavenumber: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cap = max_wavenumber * max_wavenumber;
        let scale = grid.volume().sqrt();
        let values = grid
            .xi_sq()
            .iter()
            .map(|&k2| {
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                if k2 <= cap {
                    Complex64::new(re, im) * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Field {
            grid,
            rep: Representation::Frequency,
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.spec() == other.grid.spec()
    }

    pub fn to_frequency(&self) -> Field {
        match self.rep {
            Representation::Frequency => self.clone(),
            Representation::Physical => {
                let mut v = self.values.clone();
                forward_in_place(&self.grid, &mut v);
                Field {
                    grid: self.grid.clone(),
                    rep: Representation::Frequency,
                    values: v,
                }
            }
        }
    }

    pub fn to_physical(&self) -> Field {
        match self.rep {
            Representation::Physical => self.clone(),
            Representation::Frequency => {
                let mut v = self.values.clone();
                inverse_in_place(&self.grid, &mut v);
                Field {
                    grid: self.grid.clone(),
                    rep: Representation::Physical,
                    values: v,
                }
            }
        }
    }

    /// Physical samples, transforming only when needed.
    pub fn physical_values(&self) -> std::borrow::Cow<'_, [Complex64]> {
        match self.rep {
            Representation::Physical => std::borrow::Cow::Borrowed(&self.values),
            Representation::Frequency => std::borrow::Cow::Owned(self.to_physical().values),
        }
    }

    pub fn frequency_values(&self) -> std::borrow::Cow<'_, [Complex64]> {
        match self.rep {
            Representation::Frequency => std::borrow::Cow::Borrowed(&self.values),
            Representation::Physical => std::borrow::Cow::Owned(self.to_frequency().values),
        }
    }

    /// `‖u‖₂²` by the physical quadrature rule.
    pub fn mass(&self) -> f64 {
        let w = self.grid.cell_volume();
        match self.rep {
            Representation::Physical => w * sum_sq(&self.values),
            Representation::Frequency => sum_sq(&self.values) / self.grid.volume(),
        }
    }

    /// `(2π)^{-N} ∫ w(|ξ|²) |û(ξ)|² dξ` for a radial multiplier `w`.
    pub fn spectral_integral<W: Fn(f64) -> f64>(&self, weight: W) -> f64 {
        let spec = self.frequency_values();
        let s: f64 = spec
            .iter()
            .zip(self.grid.xi_sq())
            .map(|(c, &k2)| weight(k2) * c.norm_sqr())
            .sum();
        s / self.grid.volume()
    }

    pub fn norms(&self) -> Norms {
        let spec = self.frequency_values();
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (c, &k2) in spec.iter().zip(self.grid.xi_sq()) {
            let a = c.norm_sqr();
            m0 += a;
            m1 += k2 * a;
            m2 += k2 * k2 * a;
        }
        let v = self.grid.volume();
        Norms {
            mass: m0 / v,
            grad_sq: m1 / v,
            lap_sq: m2 / v,
        }
    }

    /// `‖u‖_p^p` by the uniform grid quadrature.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("L^p exponent must be >= 1, got {p}")));
        }
        let phys = self.physical_values();
        let s: f64 = if p == 2.0 {
            sum_sq(&phys)
        } else {
            phys.iter().map(|c| c.norm().powf(p)).sum()
        };
        Ok(s * self.grid.cell_volume())
    }

    pub fn scaled(&self, factor: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            rep: self.rep,
            values: self.values.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn scaled_complex(&self, factor: Complex64) -> Field {
        Field {
            grid: self.grid.clone(),
            rep: self.rep,
            values: self.values.iter().map(|c| c * factor).collect(),
        }
    }

    /// Rescales to mass `c`.
    pub fn normalized_to(&self, c: f64) -> Result<Field> {
        let m = self.mass();
        if m <= 0.0 || !m.is_finite() {
            return Err(Error::ZeroField);
        }
        Ok(self.scaled((c / m).sqrt()))
    }

    /// Cyclic translation by whole grid cells, `shift[axis]` cells along each axis.
    pub fn cyclic_shift(&self, shift: &[isize]) -> Field {
        let phys = self.to_physical();
        let grid = &self.grid;
        let d = grid.dim();
        let m = grid.points_per_axis() as isize;
        let mut idx = [0usize; MAX_DIM];
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (flat, v) in phys.values.iter().enumerate() {
            grid.unflatten(flat, &mut idx[..d]);
            for (a, i) in idx[..d].iter_mut().enumerate() {
                let s = shift.get(a).copied().unwrap_or(0);
                *i = (*i as isize + s).rem_euclid(m) as usize;
            }
            out[grid.flatten(&idx[..d])] = *v;
        }
        Field {
            grid: self.grid.clone(),
            rep: Representation::Physical,
            values: out,
        }
    }

    /// Applies a radial Fourier multiplier `m(|ξ|²)`; the result is in frequency form.
    pub fn apply_multiplier<W: Fn(f64) -> f64>(&self, mult: W) -> Field {
        let spec = self.frequency_values();
        let values = spec
            .iter()
            .zip(self.grid.xi_sq())
            .map(|(c, &k2)| c * mult(k2))
            .collect();
        Field {
            grid: self.grid.clone(),
            rep: Representation::Frequency,
            values,
        }
    }

    /// Real `L²` inner product `Re ∫ ū v`.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let a = self.physical_values();
        let b = other.physical_values();
        Ok(real_inner(&a, &b) * self.grid.cell_volume())
    }

    /// Largest relative deviation from `other`, measured in the `L²` sense.
    pub fn relative_distance(&self, other: &Field) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let a = self.physical_values();
        let b = other.physical_values();
        let diff: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum();
        let base = sum_sq(&b).max(f64::MIN_POSITIVE);
        Ok((diff / base).sqrt())
    }
}

pub(crate) fn sum_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

pub(crate) fn real_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Physical samples to `û(ξ_k)` in place.
pub(crate) fn forward_in_place(grid: &Grid, v: &mut [Complex64]) {
    grid.fft_all(v, false);
    let w = grid.cell_volume();
    for (flat, c) in v.iter_mut().enumerate() {
        *c *= w * grid.parity_sign(flat);
    }
}

/// `û(ξ_k)` to physical samples in place.
pub(crate) fn inverse_in_place(grid: &Grid, v: &mut [Complex64]) {
    let w = 1.0 / (grid.cell_volume() * grid.len() as f64);
    for (flat, c) in v.iter_mut().enumerate() {
        *c *= w * grid.parity_sign(flat);
    }
    grid.fft_all(v, true);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn grid(dim: usize, l: f64, m: usize) -> Arc<Grid> {
        Grid::new(GridSpec::new(dim, l, m).unwrap()).unwrap()
    }

    #[test]
    fn constant_is_a_zero_frequency_delta() {
        let g = grid(2, 3.0, 16);
        let f = Field::from_fn(g.clone(), |_| Complex64::new(1.0, 0.0)).to_frequency();
        for (flat, c) in f.values().iter().enumerate() {
            if flat == 0 {
                assert!((c.re - g.volume()).abs() < 1e-12);
            } else {
                assert!(c.norm() < 1e-12, "leak at {flat}: {c}");
            }
        }
    }

    #[test]
    fn gaussian_moments_1d() {
        let g = grid(1, 12.0, 256);
        let f = Field::from_fn(g, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
        let n = f.norms();
        let sp = PI.sqrt();
        assert!((n.mass - sp).abs() < 1e-8);
        assert!((n.grad_sq - sp / 2.0).abs() < 1e-8);
        assert!((n.lap_sq - 0.75 * sp).abs() < 1e-8);
        let l4 = f.lp_norm(4.0).unwrap();
        assert!((l4 - (PI / 2.0).sqrt()).abs() < 1e-8);
        assert!((f.lp_norm(2.0).unwrap() - n.mass).abs() < 1e-12 * n.mass);
    }

    #[test]
    fn zero_field_and_bad_exponent() {
        let g = grid(1, 1.0, 16);
        let z = Field::zeros(g);
        let n = z.norms();
        assert_eq!((n.mass, n.grad_sq, n.lap_sq), (0.0, 0.0, 0.0));
        assert_eq!(z.lp_norm(3.0).unwrap(), 0.0);
        assert!(z.lp_norm(0.5).is_err());
        assert!(z.normalized_to(1.0).is_err());
    }

    #[test]
    fn frequency_gaussian_matches_continuous_transform() {
        // e^{-x²/2} has transform √(2π) e^{-ξ²/2}
        let g = grid(1, 12.0, 128);
        let f = Field::from_fn(g.clone(), |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0))
            .to_frequency();
        for (q, c) in f.values().iter().enumerate() {
            let xi = g.wavenumbers()[q];
            let exact = (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp();
            assert!((c.re - exact).abs() < 1e-10 && c.im.abs() < 1e-10);
        }
    }

    #[test]
    fn cyclic_shift_moves_samples() {
        let g = grid(1, 1.0, 16);
        let f = Field::from_fn(g, |x| Complex64::new(x[0], 0.0));
        let s = f.cyclic_shift(&[1]);
        assert_eq!(s.values()[1], f.values()[0]);
        assert_eq!(s.values()[0], f.values()[15]);
    }
}
