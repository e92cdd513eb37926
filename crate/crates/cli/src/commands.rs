use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mixdisp::families::{
    bessel_phi, bessel_radial_norms, bessel_witness, bump_family, bump_grid, fit_bound, gaussian_closed_form,
    gaussian_witness, BesselWitness, FamilyBoundReport, FamilyKind, GaussianWitness,
};
use mixdisp::gn::{critical_mass, estimate_bn, gn_default_grid, unbounded_witness, GnOptions, GnReport};
use mixdisp::{
    energy, fourier_symmetrize, localization_fraction, minimize_on_sphere, rayleigh_r, scan, Classification, Field,
    Grid, MinimizeReport, Norms, Regime, ScanSummary,
};
use serde::Serialize;

use crate::config::{FamilyChoice, RunConfig};
use crate::{dump, svg, validate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VANISHING: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Serialize)]
struct Doc<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    result: T,
}

fn output_dir(cfg: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.output_path).with_context(|| format!("creating {}", cfg.output_path.display()))?;
    Ok(cfg.output_path.clone())
}

fn write_json<T: Serialize>(path: &Path, cfg: &RunConfig, result: T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&Doc { config: cfg, result })?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_svg(cfg: &RunConfig, dir: &Path, name: &str, u: &Field, title: &str) -> Result<()> {
    if cfg.svg {
        fs::write(dir.join(name), svg::profile(u, title))?;
    }
    Ok(())
}

pub fn exit_code(c: Classification) -> i32 {
    match c {
        Classification::MinimizerFound => EXIT_OK,
        Classification::VanishingSuspected => EXIT_VANISHING,
        Classification::NotConverged => EXIT_NOT_CONVERGED,
    }
}

#[derive(Serialize)]
struct MinimizeOut<'a> {
    report: &'a MinimizeReport,
}

pub fn minimize(cfg: &RunConfig) -> Result<i32> {
    let grid = Grid::new(cfg.grid_spec())?;
    let (report, field) = minimize_on_sphere(&cfg.physics, &grid, cfg.c, &cfg.solve)?;
    let dir = output_dir(cfg)?;
    write_json(&dir.join("minimize.json"), cfg, MinimizeOut { report: &report })?;
    dump::write_field(&dir.join("minimizer.bin"), &field)?;
    write_svg(
        cfg,
        &dir,
        "minimizer.svg",
        &field,
        &format!("minimizer c={} sigma={} ({})", cfg.c, cfg.physics.sigma, report.classification),
    )?;
    println!(
        "{}: m = {:.12e}, margin = {:.6e}, lambda = {:.10}, iterations = {}",
        report.classification, report.m_hat, report.margin, report.lambda_hat, report.iterations
    );
    Ok(exit_code(report.classification))
}

pub const SCAN_HEADER: &str = "sigma,c,margin,classification,iterations";

pub fn scan_csv(summary: &ScanSummary) -> String {
    let mut s = String::from(SCAN_HEADER);
    s.push('\n');
    for r in &summary.records {
        let margin = r.margin.map(|m| m.to_string()).unwrap_or_default();
        let class = r.classification.map(|c| c.as_str()).unwrap_or("error");
        let _ = writeln!(s, "{},{},{margin},{class},{}", r.sigma, r.c, r.iterations);
    }
    s
}

pub fn scan_cmd(cfg: &RunConfig) -> Result<i32> {
    let grid = Grid::new(cfg.grid_spec())?;
    let summary = scan(&cfg.physics, &grid, &cfg.scan.sigmas, &cfg.scan.cs, &cfg.solve)?;
    let dir = output_dir(cfg)?;
    fs::write(dir.join("scan.csv"), scan_csv(&summary))?;
    write_json(&dir.join("scan_summary.json"), cfg, &summary)?;
    for r in &summary.records {
        if let Some(e) = &r.error {
            eprintln!("sigma={} c={}: {e}", r.sigma, r.c);
        }
    }
    let failed = summary.records.iter().filter(|r| r.error.is_some()).count();
    println!("{} rows, {failed} failed", summary.records.len());
    if failed == summary.records.len() {
        return Ok(EXIT_ERROR);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct GaussianRow {
    tau: f64,
    quadratic: f64,
    lp: f64,
    phi: f64,
}

#[derive(Serialize)]
struct BesselRow {
    m: f64,
    mass: f64,
    lap_plus_one_sq: f64,
    lp: f64,
    phi: f64,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FamilyOut {
    Gaussian {
        rows: Vec<GaussianRow>,
        quadratic_fit: FamilyBoundReport,
        lp_fit: FamilyBoundReport,
        witness: Option<GaussianWitness>,
    },
    Bessel {
        rows: Vec<BesselRow>,
        mass_fit: FamilyBoundReport,
        lap_fit: FamilyBoundReport,
        lp_fit: FamilyBoundReport,
        witness: Option<BesselWitness>,
    },
}

pub fn family(cfg: &RunConfig) -> Result<i32> {
    let p = &cfg.physics;
    if !p.is_normalized() {
        bail!("the test families are defined for the normalized parameters gamma = 2, beta = 4");
    }
    let (out, csv) = match cfg.family.kind {
        FamilyChoice::Gaussian => {
            let taus = cfg.family.parameters.clone().unwrap_or_else(|| vec![0.0625, 0.125, 0.25, 0.5, 1.0]);
            let rows = taus
                .iter()
                .map(|&tau| {
                    let t = gaussian_closed_form(p, cfg.c, tau)?;
                    Ok(GaussianRow { tau, quadratic: t.quadratic, lp: t.lp, phi: t.phi })
                })
                .collect::<mixdisp::Result<Vec<_>>>()?;
            let q: Vec<f64> = rows.iter().map(|r| r.quadratic).collect();
            let l: Vec<f64> = rows.iter().map(|r| r.lp).collect();
            let mut csv = String::from("tau,quadratic,lp,phi\n");
            for r in &rows {
                let _ = writeln!(csv, "{},{},{},{}", r.tau, r.quadratic, r.lp, r.phi);
            }
            let witness = gaussian_witness(p, cfg.c, cfg.family.max_steps)?;
            match witness {
                Some(w) => println!("gaussian witness: tau = {}, phi = {:.6e}", w.tau, w.phi),
                None => println!("no gaussian witness within {} halvings", cfg.family.max_steps),
            }
            let out = FamilyOut::Gaussian {
                quadratic_fit: fit_bound(FamilyKind::GaussianTau, &taus, &q)?,
                lp_fit: fit_bound(FamilyKind::GaussianTau, &taus, &l)?,
                rows,
                witness,
            };
            (out, csv)
        }
        FamilyChoice::Bessel => {
            let ms = cfg.family.parameters.clone().unwrap_or_else(|| vec![8.0, 16.0, 32.0, 64.0]);
            let rows = ms
                .iter()
                .map(|&m| {
                    let b = bessel_radial_norms(p.dim, m, p.p())?;
                    Ok(BesselRow {
                        m,
                        mass: b.mass,
                        lap_plus_one_sq: b.lap_plus_one_sq,
                        lp: b.lp,
                        phi: bessel_phi(p, cfg.c, m)?,
                    })
                })
                .collect::<mixdisp::Result<Vec<_>>>()?;
            let col = |f: fn(&BesselRow) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
            let mut csv = String::from("m,mass,lap_plus_one_sq,lp,phi\n");
            for r in &rows {
                let _ = writeln!(csv, "{},{},{},{},{}", r.m, r.mass, r.lap_plus_one_sq, r.lp, r.phi);
            }
            let witness = bessel_witness(p, cfg.c, cfg.family.max_steps)?;
            match witness {
                Some(w) => println!("bessel witness: m = {}, phi = {:.6e}", w.m, w.phi),
                None => println!("no bessel witness up to m = 2^{}", cfg.family.max_steps),
            }
            let out = FamilyOut::Bessel {
                mass_fit: fit_bound(FamilyKind::BesselM, &ms, &col(|r| r.mass))?,
                lap_fit: fit_bound(FamilyKind::BesselM, &ms, &col(|r| r.lap_plus_one_sq))?,
                lp_fit: fit_bound(FamilyKind::BesselM, &ms, &col(|r| r.lp))?,
                rows,
                witness,
            };
            (out, csv)
        }
    };
    let dir = output_dir(cfg)?;
    fs::write(dir.join("family.csv"), csv)?;
    write_json(&dir.join("family.json"), cfg, out)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
pub struct MiRow {
    pub n: u32,
    pub rayleigh: f64,
    pub i_over_c: f64,
    /// `I(u_n) / m_I(c)`.
    pub ratio_to_mi: f64,
    pub localization: f64,
}

pub const MI_LOCALIZATION_RADIUS: f64 = 10.0;

pub fn mi_table(cfg: &RunConfig) -> Result<Vec<MiRow>> {
    let p = &cfg.physics;
    if !p.is_normalized() {
        bail!("the bump family is centred on the unit shell; mi-check needs gamma = 2, beta = 4");
    }
    if cfg.mi_check.ns.is_empty() {
        bail!("mi_check.ns must be non-empty");
    }
    let m_i = -p.threshold_slope() * cfg.c;
    cfg.mi_check
        .ns
        .iter()
        .map(|&n| {
            let g = Grid::new(bump_grid(p.dim, n)?)?;
            let u = bump_family(cfg.c, n, &g)?;
            let i = energy(p, &u)?.quadratic;
            Ok(MiRow {
                n,
                rayleigh: rayleigh_r(&u)?,
                i_over_c: i / cfg.c,
                ratio_to_mi: i / m_i,
                localization: localization_fraction(&u, MI_LOCALIZATION_RADIUS)?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct MiOut {
    m_i: f64,
    localization_radius: f64,
    rows: Vec<MiRow>,
}

pub fn mi_check(cfg: &RunConfig) -> Result<i32> {
    let rows = mi_table(cfg)?;
    let dir = output_dir(cfg)?;
    let mut csv = String::from("n,rayleigh,i_over_c,ratio_to_mi,localization\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{},{},{}", r.n, r.rayleigh, r.i_over_c, r.ratio_to_mi, r.localization);
        println!("n = {:>4}: I/c = {:.8}, I/m_I = {:.8}, R = {:.8}", r.n, r.i_over_c, r.ratio_to_mi, r.rayleigh);
    }
    fs::write(dir.join("mi_check.csv"), csv)?;
    write_json(
        &dir.join("mi_check.json"),
        cfg,
        MiOut {
            m_i: -cfg.physics.threshold_slope() * cfg.c,
            localization_radius: MI_LOCALIZATION_RADIUS,
            rows,
        },
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct WitnessRay {
    mass_factor: f64,
    c: f64,
    s: Vec<f64>,
    energy: Vec<f64>,
}

#[derive(Serialize)]
struct GnOut {
    report: GnReport,
    witness: Vec<WitnessRay>,
}

pub fn gn(cfg: &RunConfig) -> Result<i32> {
    let p = &cfg.physics;
    let spec = cfg.gn.grid.unwrap_or_else(|| gn_default_grid(p.dim));
    let grid = Grid::new(spec)?;
    let opts = GnOptions {
        starts: cfg.gn.starts,
        max_iterations: cfg.gn.max_iterations,
        tol: cfg.gn.tol,
        seed: cfg.seed,
    };
    let (mut report, maximizer) = estimate_bn(p.sigma, &grid, &opts)?;
    let mut witness = Vec::new();
    if p.regime == Regime::Critical {
        report = critical_mass(p, &report)?;
        let c_star = report.c_star.expect("filled by critical_mass");
        for &f in &cfg.gn.mass_factors {
            witness.push(WitnessRay {
                mass_factor: f,
                c: f * c_star,
                s: cfg.gn.s_list.clone(),
                energy: unbounded_witness(p, f * c_star, &maximizer, &cfg.gn.s_list)?,
            });
        }
    }
    println!("B_N = {:.12}, spread = {:.3e}", report.b_n, report.spread);
    if let Some(c) = report.c_star {
        println!("c* = {c:.10}");
    }
    let dir = output_dir(cfg)?;
    write_json(&dir.join("gn.json"), cfg, GnOut { report, witness })?;
    dump::write_field(&dir.join("gn_maximizer.bin"), &maximizer)?;
    write_svg(cfg, &dir, "gn_maximizer.svg", &maximizer, &format!("GN maximizer sigma={}", p.sigma))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct FieldSummary {
    norms: Norms,
    lp: f64,
}

#[derive(Serialize)]
struct SymmetrizeOut {
    p: f64,
    input: FieldSummary,
    symmetrized: FieldSummary,
}

pub fn symmetrize(cfg: &RunConfig) -> Result<i32> {
    let u = match &cfg.symmetrize.input {
        Some(path) => dump::read_field(path)?,
        None => Field::random_band_limited(Grid::new(cfg.grid_spec())?, cfg.symmetrize.max_wavenumber, cfg.seed),
    };
    let p = cfg.physics.p();
    let q = fourier_symmetrize(&u);
    let out = SymmetrizeOut {
        p,
        input: FieldSummary { norms: u.norms(), lp: u.lp_norm(p)? },
        symmetrized: FieldSummary { norms: q.norms(), lp: q.lp_norm(p)? },
    };
    println!("||u||_p^p = {:.12e} -> {:.12e}", out.input.lp, out.symmetrized.lp);
    let dir = output_dir(cfg)?;
    write_json(&dir.join("symmetrize.json"), cfg, out)?;
    dump::write_field(&dir.join("symmetrized.bin"), &q.to_physical())?;
    write_svg(cfg, &dir, "symmetrized.svg", &q, "Fourier symmetrization")?;
    Ok(EXIT_OK)
}

pub fn validate_cmd(cfg: &RunConfig) -> Result<i32> {
    let checks = validate::run_all(cfg.seed);
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{} checks, {failed} failed", checks.len());
    let dir = output_dir(cfg)?;
    #[derive(Serialize)]
    struct Out<'a> {
        checks: &'a [validate::Check],
    }
    write_json(&dir.join("validate.json"), cfg, Out { checks: &checks })?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_ERROR })
}
