use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mixdisp::{GridSpec, PhysicsParams, SolveOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub sigmas: Vec<f64>,
    pub cs: Vec<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            sigmas: vec![0.5, 1.0],
            cs: vec![0.05, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyChoice {
    Gaussian,
    Bessel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyChoice,
    /// τ values (gaussian) or m values (bessel) for the bound tables.
    pub parameters: Option<Vec<f64>>,
    /// Witness sweep length: τ = 2^{-k} or m = 2^j.
    pub max_steps: u32,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            kind: FamilyChoice::Gaussian,
            parameters: None,
            max_steps: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MiCheckConfig {
    pub ns: Vec<u32>,
}

impl Default for MiCheckConfig {
    fn default() -> Self {
        Self {
            ns: vec![1, 2, 4, 8, 16, 32, 64],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GnConfig {
    pub starts: usize,
    pub max_iterations: usize,
    pub tol: f64,
    pub grid: Option<GridSpec>,
    /// Dilation factors for the witness ray (critical case only).
    pub s_list: Vec<f64>,
    /// Witness masses as multiples of `ĉ*`.
    pub mass_factors: Vec<f64>,
}

impl Default for GnConfig {
    fn default() -> Self {
        let o = mixdisp::gn::GnOptions::default();
        Self {
            starts: o.starts,
            max_iterations: o.max_iterations,
            tol: o.tol,
            grid: None,
            s_list: vec![1.0, 2.0, 4.0, 8.0],
            mass_factors: vec![0.9, 1.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmetrizeConfig {
    /// Binary field dump; a seeded random field is used when absent.
    pub input: Option<PathBuf>,
    pub max_wavenumber: f64,
}

impl Default for SymmetrizeConfig {
    fn default() -> Self {
        Self {
            input: None,
            max_wavenumber: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub physics: PhysicsParams,
    pub grid: Option<GridSpec>,
    pub solve: SolveOptions,
    pub c: f64,
    pub scan: ScanConfig,
    pub family: FamilyConfig,
    pub mi_check: MiCheckConfig,
    pub gn: GnConfig,
    pub symmetrize: SymmetrizeConfig,
    pub seed: u64,
    pub output_path: PathBuf,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            physics: PhysicsParams::normalized(1.0, 1.0, 1).expect("default parameters are admissible"),
            grid: None,
            solve: SolveOptions::default(),
            c: 1.0,
            scan: ScanConfig::default(),
            family: FamilyConfig::default(),
            mi_check: MiCheckConfig::default(),
            gn: GnConfig::default(),
            symmetrize: SymmetrizeConfig::default(),
            seed: 0,
            output_path: PathBuf::from("out"),
            svg: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub svg: bool,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("invalid config {}", p.display()))
            }
        }
    }

    /// Applies flag overrides, fills defaults that depend on other fields and checks
    /// cross-field preconditions.
    pub fn resolve(mut self, o: &Overrides) -> Result<Self> {
        if let Some(out) = &o.out {
            self.output_path = out.clone();
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        self.svg |= o.svg;
        self.solve.seed = self.seed;
        let spec = self.grid.unwrap_or_else(|| GridSpec::default_for_dim(self.physics.dim));
        spec.validate()?;
        if spec.dim != self.physics.dim {
            bail!("grid dimension {} does not match physics dimension {}", spec.dim, self.physics.dim);
        }
        self.grid = Some(spec);
        if let Some(g) = &self.gn.grid {
            g.validate()?;
            if g.dim != self.physics.dim {
                bail!("gn grid dimension {} does not match physics dimension {}", g.dim, self.physics.dim);
            }
        }
        self.solve.validate()?;
        if !(self.c > 0.0 && self.c.is_finite()) {
            bail!("mass c must be positive, got {}", self.c);
        }
        Ok(self)
    }

    pub fn grid_spec(&self) -> GridSpec {
        self.grid.unwrap_or_else(|| GridSpec::default_for_dim(self.physics.dim))
    }
}
