use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::MAX_DIM;

/// Tolerance on `σN = 4` when deciding the critical regime.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `0 < σN < 4`
    Subcritical,
    /// `σN = 4`
    Critical,
}

/// Model constants of `E(u) = γ/2 ‖Δu‖² − β/2 ‖∇u‖² − α/(2σ+2) ‖u‖_{2σ+2}^{2σ+2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct PhysicsParams {
    pub gamma: f64,
    pub beta: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub dim: usize,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RawParams {
    pub gamma: f64,
    pub beta: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub dim: usize,
}

impl TryFrom<RawParams> for PhysicsParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        PhysicsParams::new(r.gamma, r.beta, r.alpha, r.sigma, r.dim)
    }
}

impl From<PhysicsParams> for RawParams {
    fn from(p: PhysicsParams) -> Self {
        RawParams {
            gamma: p.gamma,
            beta: p.beta,
            alpha: p.alpha,
            sigma: p.sigma,
            dim: p.dim,
        }
    }
}

impl PhysicsParams {
    pub fn new(gamma: f64, beta: f64, alpha: f64, sigma: f64, dim: usize) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("beta", beta), ("alpha", alpha), ("sigma", sigma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidParams(format!(
                "dimension must be in 1..={MAX_DIM}, got {dim}"
            )));
        }
        let sn = sigma * dim as f64;
        let regime = if (sn - 4.0).abs() <= CRITICAL_TOL {
            Regime::Critical
        } else if sn < 4.0 {
            Regime::Subcritical
        } else {
            return Err(Error::InvalidRegime(format!(
                "supercritical sigma*N = {sn} > 4; the mass-subcritical bound requires 0 < sigma*N < 4 \
                 (or sigma*N = 4 in the critical regime)"
            )));
        };
        Ok(PhysicsParams {
            gamma,
            beta,
            alpha,
            sigma,
            dim,
            regime,
        })
    }

    /// `γ = 2`, `β = 4`: the quadratic part becomes `‖(Δ+1)u‖² − ‖u‖²`.
    pub fn normalized(alpha: f64, sigma: f64, dim: usize) -> Result<Self> {
        Self::new(2.0, 4.0, alpha, sigma, dim)
    }

    pub fn is_normalized(&self) -> bool {
        self.gamma == 2.0 && self.beta == 4.0
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.gamma, self.beta, self.alpha, sigma, self.dim)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.gamma, self.beta, alpha, self.sigma, self.dim)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(gamma, self.beta, self.alpha, self.sigma, self.dim)
    }

    /// Nonlinearity exponent `2σ + 2`.
    pub fn p(&self) -> f64 {
        2.0 * self.sigma + 2.0
    }

    /// Squared radius `β/(2γ)` of the frequency shell where the quadratic symbol is minimal.
    pub fn shell_radius_sq(&self) -> f64 {
        self.beta / (2.0 * self.gamma)
    }

    /// Bottom of the spectrum of `γΔ² + βΔ`, `−β²/(4γ)`, reported as the positive `β²/(4γ)`.
    pub fn spectral_bottom(&self) -> f64 {
        self.beta * self.beta / (4.0 * self.gamma)
    }

    /// Slope `β²/(8γ)` of `m_I(c) = −β²c/(8γ)`.
    pub fn threshold_slope(&self) -> f64 {
        self.beta * self.beta / (8.0 * self.gamma)
    }

    pub fn sigma_n(&self) -> f64 {
        self.sigma * self.dim as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(PhysicsParams::normalized(1.0, 1.0, 1).unwrap().regime, Regime::Subcritical);
        assert_eq!(PhysicsParams::normalized(1.0, 4.0, 1).unwrap().regime, Regime::Critical);
        assert_eq!(PhysicsParams::normalized(1.0, 2.0, 2).unwrap().regime, Regime::Critical);
        let err = PhysicsParams::normalized(1.0, 5.0, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidRegime(_)));
        assert!(err.to_string().contains("0 < sigma*N < 4"));
    }

    #[test]
    fn rejects_nonpositive_constants() {
        assert!(PhysicsParams::new(0.0, 4.0, 1.0, 1.0, 1).is_err());
        assert!(PhysicsParams::new(2.0, -4.0, 1.0, 1.0, 1).is_err());
        assert!(PhysicsParams::new(2.0, 4.0, 0.0, 1.0, 1).is_err());
        assert!(PhysicsParams::new(2.0, 4.0, 1.0, 0.0, 1).is_err());
        assert!(PhysicsParams::new(2.0, 4.0, 1.0, 1.0, 5).is_err());
    }

    #[test]
    fn derived_constants_at_normalization() {
        let p = PhysicsParams::normalized(1.0, 1.0, 1).unwrap();
        assert_eq!(p.shell_radius_sq(), 1.0);
        assert_eq!(p.spectral_bottom(), 2.0);
        assert_eq!(p.threshold_slope(), 1.0);
        assert_eq!(p.p(), 4.0);
    }
}
