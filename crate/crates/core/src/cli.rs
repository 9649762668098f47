//! Command-line front end: `sweep`, `eigs`, `verify` and `fit`.
//!
//! Settings are layered as flags over an optional `--config` JSON file over
//! built-in defaults. Exit codes: 0 success, 1 verification failure, 2 usage
//! or configuration error, 3 numerical failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::herglotz::{fit_trace, harmonic_on_grid};
use crate::specfun::HarmonicIndex;
use crate::spectra::{ball_dirichlet_eigs, single_layer_eig_sweep, EigenSource, EigenvalueRecord};
use crate::surface::{
    default_direction_resolution, default_interior_count, default_surface_resolution,
    make_direction_grid, make_sphere, make_star_surface, sample_interior, PerturbationTerm,
    SurfaceGrid,
};
use crate::sweep::{sweep_k, SweepOptions, SweepResult};
use crate::verify::standard_suite;

/// Environment variable read for the worker-thread cap when neither the
/// flag nor the config file sets one.
pub const THREADS_ENV: &str = "PWCOMPLETE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    Ball,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Closed-form ball eigenvalues.
    Analytic,
    /// Subspace indicator of plane-wave traces.
    Trace,
    /// Smallest singular value of the single-layer operator.
    SingleLayer,
}

/// Everything a run depends on. Thread count and output paths do not
/// change results and are not serialized into artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceKind,
    /// Sphere radius, or base radius `R0` of a star surface.
    pub radius: f64,
    pub perturbation: Vec<PerturbationTerm>,
    pub n_theta: Option<usize>,
    pub n_phi: Option<usize>,
    pub directions: Option<[usize; 2]>,
    pub kmin: f64,
    pub kmax: f64,
    pub samples: usize,
    pub seed: u64,
    pub interior_count: Option<usize>,
    pub method: Option<Method>,
    pub depth_ratio: f64,
    pub gap_ratio: f64,
    pub refine_tol: f64,
    pub ridge: Option<f64>,
    pub target: Option<[i64; 2]>,
    pub k: Option<f64>,
    pub inject_off_spectrum: bool,
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let opts = SweepOptions::default();
        Self {
            surface: SurfaceKind::Ball,
            radius: 1.0,
            perturbation: Vec::new(),
            n_theta: None,
            n_phi: None,
            directions: None,
            kmin: 3.0,
            kmax: 6.5,
            samples: 350,
            seed: 0,
            interior_count: None,
            method: None,
            depth_ratio: opts.depth_ratio,
            gap_ratio: opts.gap_ratio,
            refine_tol: opts.refine_tol,
            ridge: None,
            target: None,
            k: None,
            inject_off_spectrum: false,
            threads: None,
            csv: None,
            json: None,
        }
    }
}

impl RunConfig {
    /// Parse a config file. An artifact written by this tool is accepted
    /// too: its embedded `run_config` is used.
    pub fn from_json(s: &str) -> Result<Self> {
        let mut v: serde_json::Value = serde_json::from_str(s)?;
        if let Some(inner) = v.get_mut("run_config") {
            v = inner.take();
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if !(self.kmax.is_finite() && self.kmax > 0.0) {
            return bad(format!("kmax must be positive, got {}", self.kmax));
        }
        if self.n_theta.is_some() != self.n_phi.is_some() {
            return bad("n_theta and n_phi must be given together".into());
        }
        let counts = [self.n_theta, self.n_phi, self.interior_count, self.threads];
        if counts.contains(&Some(0))
            || self.directions.is_some_and(|d| d.contains(&0))
        {
            return bad("counts must be positive".into());
        }
        if !(self.depth_ratio > 0.0 && self.depth_ratio < 1.0) {
            return bad(format!("depth_ratio must lie in (0, 1), got {}", self.depth_ratio));
        }
        if !(self.gap_ratio > 1.0 && self.refine_tol > 0.0) {
            return bad("gap_ratio must exceed 1 and refine_tol must be positive".into());
        }
        if self.ridge.is_some_and(|r| !(r >= 0.0 && r.is_finite())) {
            return bad("ridge must be non-negative".into());
        }
        if self.surface == SurfaceKind::Ball && !self.perturbation.is_empty() {
            return bad("perturbation terms need --surface star".into());
        }
        Ok(())
    }

    /// Checks of the sweep range on top of [`RunConfig::validate`].
    pub fn validate_sweep(&self) -> Result<()> {
        self.validate()?;
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.kmin.is_finite() && self.kmin > 0.0) {
            return bad(format!("kmin must be positive, got {}", self.kmin));
        }
        if self.kmin >= self.kmax {
            return bad(format!("kmin {} must be below kmax {}", self.kmin, self.kmax));
        }
        if self.samples < 3 {
            return bad(format!("need at least 3 samples, got {}", self.samples));
        }
        Ok(())
    }

    /// Upper bound on the radius of the configured surface.
    pub fn outer_radius(&self) -> f64 {
        let bump: f64 = self
            .perturbation
            .iter()
            .map(|t| t.coefficient.abs() * ((2 * t.index.l + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt())
            .sum();
        self.radius * (1.0 + bump)
    }

    /// Surface grid sized for wavenumbers up to `k` unless set explicitly.
    pub fn surface_grid(&self, k: f64) -> Result<SurfaceGrid> {
        let (nt, np) = match (self.n_theta, self.n_phi) {
            (Some(t), Some(p)) => (t, p),
            _ => default_surface_resolution(k, self.outer_radius()),
        };
        match self.surface {
            SurfaceKind::Ball => make_sphere(self.radius, nt, np),
            SurfaceKind::Star => make_star_surface(self.radius, &self.perturbation, nt, np),
        }
    }

    fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            depth_ratio: self.depth_ratio,
            gap_ratio: self.gap_ratio,
            refine_tol: self.refine_tol,
            resolve: true,
            threads: self.threads.unwrap_or(1),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pwcomplete", version, about = "Plane-wave trace completeness on closed surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep a completeness indicator over a k range and report its dips.
    Sweep(SweepArgs),
    /// List Dirichlet eigenvalues, analytic or from a sweep.
    Eigs(SweepArgs),
    /// Run the verification suite on the ball.
    Verify(VerifyArgs),
    /// Least-squares fit of a spherical harmonic by plane-wave traces.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON config file (or an earlier artifact); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    surface: Option<SurfaceKind>,
    /// Sphere radius or star base radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Star perturbation term `l,m,eps`; repeatable.
    #[arg(long = "coef", value_parser = parse_coef, allow_hyphen_values = true)]
    coef: Vec<PerturbationTerm>,
    #[arg(long)]
    n_theta: Option<usize>,
    #[arg(long)]
    n_phi: Option<usize>,
    /// Direction grid `n_theta,n_phi`.
    #[arg(long, value_parser = parse_pair)]
    dirs: Option<[usize; 2]>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for k evaluations.
    #[arg(long)]
    threads: Option<usize>,
    /// Write the JSON artifact here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    kmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kmax: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long)]
    interior_count: Option<usize>,
    #[arg(long)]
    depth_ratio: Option<f64>,
    #[arg(long)]
    gap_ratio: Option<f64>,
    #[arg(long)]
    refine_tol: Option<f64>,
    /// Write the `k,indicator` CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also run the off-spectrum negative controls.
    #[arg(long)]
    inject_off_spectrum: bool,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target harmonic `l,m`.
    #[arg(long, value_parser = parse_target, allow_hyphen_values = true)]
    target: Option<[i64; 2]>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    /// Ridge parameter; the default scales with the largest singular value.
    #[arg(long)]
    ridge: Option<f64>,
}

fn parse_coef(s: &str) -> std::result::Result<PerturbationTerm, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [l, m, eps] = parts[..] else {
        return Err(format!("expected l,m,eps, got {s:?}"));
    };
    let l: usize = l.parse().map_err(|e| format!("degree: {e}"))?;
    let m: i64 = m.parse().map_err(|e| format!("order: {e}"))?;
    let coefficient: f64 = eps.parse().map_err(|e| format!("coefficient: {e}"))?;
    let index = HarmonicIndex::new(l, m).map_err(|e| e.to_string())?;
    Ok(PerturbationTerm { index, coefficient })
}

fn parse_pair(s: &str) -> std::result::Result<[usize; 2], String> {
    match s.split_once(',') {
        Some((a, b)) => Ok([
            a.trim().parse().map_err(|e| format!("{e}"))?,
            b.trim().parse().map_err(|e| format!("{e}"))?,
        ]),
        None => Err(format!("expected n_theta,n_phi, got {s:?}")),
    }
}

fn parse_target(s: &str) -> std::result::Result<[i64; 2], String> {
    match s.split_once(',') {
        Some((a, b)) => Ok([
            a.trim().parse().map_err(|e| format!("{e}"))?,
            b.trim().parse().map_err(|e| format!("{e}"))?,
        ]),
        None => Err(format!("expected l,m, got {s:?}")),
    }
}

fn base_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::from_json(&std::fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.surface {
        cfg.surface = v;
    }
    if let Some(v) = common.radius {
        cfg.radius = v;
    }
    if !common.coef.is_empty() {
        cfg.perturbation = common.coef.clone();
    }
    if common.n_theta.is_some() {
        cfg.n_theta = common.n_theta;
    }
    if common.n_phi.is_some() {
        cfg.n_phi = common.n_phi;
    }
    if common.dirs.is_some() {
        cfg.directions = common.dirs;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    if cfg.threads.is_none() {
        cfg.threads = match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
            })?),
            Err(_) => std::thread::available_parallelism().ok().map(|n| n.get()),
        };
    }
    cfg.json = common.json.clone();
    Ok(cfg)
}

fn sweep_config(a: &SweepArgs) -> Result<RunConfig> {
    let mut cfg = base_config(&a.common)?;
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = a.$f { cfg.$f = v; } )* };
    }
    set!(kmin, kmax, samples, depth_ratio, gap_ratio, refine_tol);
    if a.method.is_some() {
        cfg.method = a.method;
    }
    if a.interior_count.is_some() {
        cfg.interior_count = a.interior_count;
    }
    cfg.csv = a.csv.clone();
    Ok(cfg)
}

/// Create the output file up front so a bad path fails before any work.
fn open_output(path: &Option<PathBuf>) -> Result<Option<BufWriter<File>>> {
    Ok(match path {
        Some(p) => Some(BufWriter::new(File::create(p).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))
        })?)),
        None => None,
    })
}

fn finish(out: Option<BufWriter<File>>, text: &str) -> Result<()> {
    if let Some(mut w) = out {
        w.write_all(text.as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

fn artifact(cfg: &RunConfig, key: &str, value: serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&json!({ "run_config": cfg, key: value }))?;
    s.push('\n');
    Ok(s)
}

/// Run a sweep with the configured method over `[kmin, kmax]`.
pub fn run_configured_sweep(cfg: &RunConfig) -> Result<SweepResult> {
    cfg.validate_sweep()?;
    let grid = cfg.surface_grid(cfg.kmax)?;
    let opts = cfg.sweep_options();
    match cfg.method.unwrap_or(Method::Trace) {
        Method::Trace => {
            let (dt, dp) = match cfg.directions {
                Some([t, p]) => (t, p),
                None => default_direction_resolution(cfg.kmax, cfg.outer_radius()),
            };
            let dirs = make_direction_grid(dt, dp)?;
            let count = cfg.interior_count.unwrap_or_else(|| default_interior_count(dirs.len()));
            let interior = sample_interior(&grid, count, cfg.seed)?;
            sweep_k(cfg.kmin, cfg.kmax, cfg.samples, &grid, &dirs, &interior, &opts)
        }
        Method::SingleLayer => single_layer_eig_sweep(cfg.kmin, cfg.kmax, cfg.samples, &grid, &opts),
        Method::Analytic => Err(Error::InvalidArgument(
            "the analytic method lists eigenvalues; use `eigs`".into(),
        )),
    }
}

fn cmd_sweep(cfg: RunConfig) -> Result<i32> {
    cfg.validate_sweep()?;
    let json_out = open_output(&cfg.json)?;
    let csv_out = open_output(&cfg.csv)?;
    let result = run_configured_sweep(&cfg)?;
    if let Some(mut w) = csv_out {
        result.write_csv(&mut w)?;
        w.flush()?;
    }
    finish(json_out, &artifact(&cfg, "sweep", serde_json::to_value(&result)?)?)?;
    println!("{:>20}  {:>12}  multiplicity", "k", "indicator");
    for d in &result.dips {
        println!("{:>20.12}  {:>12.4e}  {}", d.k_refined, d.indicator_min, d.multiplicity);
    }
    println!("{} dips", result.dips.len());
    Ok(EXIT_OK)
}

fn cmd_eigs(cfg: RunConfig) -> Result<i32> {
    cfg.validate()?;
    let json_out = open_output(&cfg.json)?;
    let method = cfg.method.unwrap_or(match cfg.surface {
        SurfaceKind::Ball => Method::Analytic,
        SurfaceKind::Star => Method::Trace,
    });
    let records: Vec<EigenvalueRecord> = match method {
        Method::Analytic => {
            if cfg.surface != SurfaceKind::Ball {
                return Err(Error::UnsupportedSurface(
                    "analytic eigenvalues exist only for the ball".into(),
                ));
            }
            ball_dirichlet_eigs(cfg.radius, cfg.kmax)?
        }
        Method::Trace | Method::SingleLayer => {
            let source = if method == Method::Trace {
                EigenSource::TraceSweep
            } else {
                EigenSource::SingleLayer
            };
            let cfg = RunConfig { method: Some(method), ..cfg.clone() };
            run_configured_sweep(&cfg)?
                .dips
                .iter()
                .map(|d| EigenvalueRecord {
                    k: d.k_refined,
                    l: None,
                    n: None,
                    multiplicity: d.multiplicity,
                    source,
                })
                .collect()
        }
    };
    let text = artifact(&cfg, "eigenvalues", serde_json::to_value(&records)?)?;
    print!("{text}");
    finish(json_out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_verify(cfg: RunConfig) -> Result<i32> {
    let json_out = open_output(&cfg.json)?;
    let mut reports = standard_suite(cfg.seed)?;
    if !cfg.inject_off_spectrum {
        reports.retain(|r| !r.expected_failure);
    }
    let mut text = serde_json::to_string(&json!({ "run_config": cfg }))?;
    text.push('\n');
    for r in &reports {
        text.push_str(&r.to_json_line()?);
        text.push('\n');
    }
    print!("{text}");
    finish(json_out, &text)?;
    let failed = reports.iter().filter(|r| !r.ok()).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", reports.len());
        return Ok(EXIT_VERIFY_FAILED);
    }
    Ok(EXIT_OK)
}

fn cmd_fit(cfg: RunConfig) -> Result<i32> {
    if !(cfg.radius.is_finite() && cfg.radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {}", cfg.radius)));
    }
    let [l, m] = cfg
        .target
        .ok_or_else(|| Error::InvalidArgument("--target l,m is required".into()))?;
    if l < 0 {
        return Err(Error::InvalidArgument(format!("degree must be non-negative, got {l}")));
    }
    let idx = HarmonicIndex::new(l as usize, m)?;
    let k = cfg
        .k
        .ok_or_else(|| Error::InvalidArgument("--k is required".into()))?;
    crate::error::check_wavenumber(k)?;
    let json_out = open_output(&cfg.json)?;
    let grid = cfg.surface_grid(k)?;
    let (dt, dp) = match cfg.directions {
        Some([t, p]) => (t, p),
        None => default_direction_resolution(k, cfg.outer_radius()),
    };
    let dirs = make_direction_grid(dt, dp)?;
    let target = harmonic_on_grid(&grid, idx);
    let fit = fit_trace(k, &target, &grid, &dirs, cfg.ridge)?;
    let value = json!({
        "k": k,
        "target": [l, m],
        "residual": fit.residual,
        "density_norm": fit.density_norm,
        "ridge": fit.ridge,
        "grid": [grid.descriptor.n_theta, grid.descriptor.n_phi],
        "directions": [dt, dp],
    });
    let text = artifact(&cfg, "fit", value)?;
    print!("{text}");
    finish(json_out, &text)?;
    Ok(EXIT_OK)
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidWavenumber(_)
        | Error::InvalidDirection(_)
        | Error::SizeMismatch { .. }
        | Error::DegenerateSurface(_)
        | Error::UnsupportedSurface(_)
        | Error::Io(_)
        | Error::Json(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sweep(a) => cmd_sweep(sweep_config(&a)?),
        Command::Eigs(a) => cmd_eigs(sweep_config(&a)?),
        Command::Verify(a) => {
            let mut cfg = base_config(&a.common)?;
            cfg.inject_off_spectrum |= a.inject_off_spectrum;
            cmd_verify(cfg)
        }
        Command::Fit(a) => {
            let mut cfg = base_config(&a.common)?;
            if a.target.is_some() {
                cfg.target = a.target;
            }
            if a.k.is_some() {
                cfg.k = a.k;
            }
            if a.ridge.is_some() {
                cfg.ridge = a.ridge;
            }
            cmd_fit(cfg)
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
