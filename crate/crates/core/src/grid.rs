//! Periodic box `[-L, L)^N` with `M` points per axis and its frequency lattice.
//!
//! The frequency lattice is `ξ_k = π k / L` for `k ∈ {-M/2, …, M/2 - 1}`. Arrays are stored
//! row-major with the last axis fastest; along every axis the frequency index follows the
//! usual FFT ordering (non-negative wavenumbers first).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub half_length: f64,
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_length: f64, points_per_axis: usize) -> Result<Self> {
        let spec = GridSpec {
            dim,
            half_length,
            points_per_axis,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension must be in 1..={MAX_DIM}, got {}",
                self.dim
            )));
        }
        if !(self.half_length.is_finite() && self.half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half_length must be positive, got {}",
                self.half_length
            )));
        }
        if self.points_per_axis < 16 || !self.points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be a power of two >= 16, got {}",
                self.points_per_axis
            )));
        }
        Ok(())
    }

    /// Default box for dimension `dim`: sixteen samples per unit-wavenumber oscillation with
    /// `L = 64π` (N = 1) or `16π` (N = 2, 3); eight samples with `L = 4π` for N = 4.
    pub fn default_for_dim(dim: usize) -> Self {
        let (half_length, points_per_axis) = match dim {
            1 => (64.0 * PI, 1024),
            2 => (16.0 * PI, 256),
            3 => (16.0 * PI, 128),
            _ => (4.0 * PI, 32),
        };
        GridSpec {
            dim,
            half_length,
            points_per_axis,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points_per_axis as f64
    }

    /// Largest representable wavenumber per axis, `π M / (2L)`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points_per_axis as f64 / (2.0 * self.half_length)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} L={:.6} M={}",
            self.dim, self.half_length, self.points_per_axis
        )
    }
}

/// A validated grid with its coordinate tables and FFT plans.
///
/// Shared behind an `Arc` by every [`crate::Field`] sampled on it. Plans are `Send + Sync`.
pub struct Grid {
    spec: GridSpec,
    coords: Vec<f64>,
    wavenumbers: Vec<f64>,
    xi_sq: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Arc<Self>> {
        spec.validate()?;
        let m = spec.points_per_axis;
        let dx = spec.spacing();
        let l = spec.half_length;
        let coords = (0..m).map(|j| -l + j as f64 * dx).collect();
        let wavenumbers: Vec<f64> = (0..m).map(|q| PI * signed_index(q, m) as f64 / l).collect();

        let total = spec.len();
        let mut xi_sq = vec![0.0; total];
        for (flat, slot) in xi_sq.iter_mut().enumerate() {
            let mut rest = flat;
            let mut acc = 0.0;
            for _ in 0..spec.dim {
                let q = rest % m;
                rest /= m;
                acc += wavenumbers[q] * wavenumbers[q];
            }
            *slot = acc;
        }

        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        Ok(Arc::new(Grid {
            spec,
            coords,
            wavenumbers,
            xi_sq,
            fwd,
            inv,
        }))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.spec.points_per_axis
    }

    pub fn half_length(&self) -> f64 {
        self.spec.half_length
    }

    pub fn len(&self) -> usize {
        self.xi_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi_sq.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spec.spacing()
    }

    /// Quadrature weight `(2L/M)^N` of the uniform rule.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim() as i32)
    }

    /// Box volume `(2L)^N`; frequency-side sums carry the factor `1/(2L)^N`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_length()).powi(self.dim() as i32)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Wavenumbers of one axis in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// `|ξ|²` for every flat frequency index.
    pub fn xi_sq(&self) -> &[f64] {
        &self.xi_sq
    }

    /// Multi-index of a flat position, axis 0 first.
    pub fn unflatten(&self, flat: usize, out: &mut [usize]) {
        let m = self.points_per_axis();
        let d = self.dim();
        let mut rest = flat;
        for axis in (0..d).rev() {
            out[axis] = rest % m;
            rest /= m;
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let m = self.points_per_axis();
        idx.iter().fold(0, |acc, &i| acc * m + i)
    }

    /// Physical coordinates of a flat position.
    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_DIM];
        self.unflatten(flat, &mut idx[..self.dim()]);
        for (o, &i) in out.iter_mut().zip(&idx[..self.dim()]) {
            *o = self.coords[i];
        }
    }

    /// Wavevector of a flat frequency position.
    pub fn wavevector(&self, flat: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_DIM];
        self.unflatten(flat, &mut idx[..self.dim()]);
        for (o, &i) in out.iter_mut().zip(&idx[..self.dim()]) {
            *o = self.wavenumbers[i];
        }
    }

    /// Unnormalized in-place DFT along every axis.
    pub(crate) fn fft_all(&self, data: &mut [Complex64], inverse: bool) {
        let plan = if inverse { &self.inv } else { &self.fwd };
        for axis in 0..self.dim() {
            self.transform_axis(data, axis, |line| plan.process(line));
        }
    }

    /// Applies `f` to every line of `data` running along `axis`.
    pub(crate) fn transform_axis<F>(&self, data: &mut [Complex64], axis: usize, mut f: F)
    where
        F: FnMut(&mut [Complex64]),
    {
        let m = self.points_per_axis();
        let d = self.dim();
        let stride = m.pow((d - 1 - axis) as u32);
        if stride == 1 {
            for line in data.chunks_exact_mut(m) {
                f(line);
            }
            return;
        }
        let block = stride * m;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = data[base + j * stride];
                }
                f(&mut buf);
                for (j, b) in buf.iter().enumerate() {
                    data[base + j * stride] = *b;
                }
            }
        }
    }

    /// `(-1)^{k_1 + … + k_N}`, the phase that recentres the DFT on `x = 0`.
    pub(crate) fn parity_sign(&self, flat: usize) -> f64 {
        let m = self.points_per_axis();
        let mut rest = flat;
        let mut s = 0usize;
        for _ in 0..self.dim() {
            s += rest % m;
            rest /= m;
        }
        if s.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

/// Signed wavenumber index of FFT position `q` on an `m`-point axis.
pub fn signed_index(q: usize, m: usize) -> i64 {
    if q < m / 2 {
        q as i64
    } else {
        q as i64 - m as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(0, 1.0, 16).is_err());
        assert!(GridSpec::new(5, 1.0, 16).is_err());
        assert!(GridSpec::new(1, -1.0, 16).is_err());
        assert!(GridSpec::new(1, 1.0, 8).is_err());
        assert!(GridSpec::new(1, 1.0, 48).is_err());
        assert!(GridSpec::new(4, 3.0, 16).is_ok());
    }

    #[test]
    fn lattice_matches_pi_k_over_l() {
        let g = Grid::new(GridSpec::new(1, 2.0, 16).unwrap()).unwrap();
        let w = g.wavenumbers();
        assert_eq!(w[0], 0.0);
        assert!((w[1] - PI / 2.0).abs() < 1e-15);
        assert!((w[8] + 8.0 * PI / 2.0).abs() < 1e-12);
        assert!((w[15] + PI / 2.0).abs() < 1e-15);
        assert!((g.coords()[0] + 2.0).abs() < 1e-15);
        assert!((g.coords()[8]).abs() < 1e-15);
    }

    #[test]
    fn flatten_round_trip() {
        let g = Grid::new(GridSpec::new(3, 1.0, 16).unwrap()).unwrap();
        let mut idx = [0usize; 3];
        for flat in [0, 1, 17, 255, 4095] {
            g.unflatten(flat, &mut idx);
            assert_eq!(g.flatten(&idx), flat);
        }
    }
}
