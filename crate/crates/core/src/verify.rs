//! Numerical checks of each step of the completeness argument on the ball:
//! the necessity construction, orthogonality of traces to `v_N`, the
//! Green's-formula reduction, and the trace/`v_N` decomposition of `L²(S)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{check_wavenumber, Error, Result};
use crate::geom;
use crate::herglotz::{assemble_trace_matrix, harmonic_on_grid, plane_wave_trace};
use crate::linalg::{self, CMat};
use crate::specfun::{
    bessel_j_deriv_unchecked, bessel_j_unchecked, bessel_zero, gauss_legendre_interval, sph_harm,
    HarmonicIndex,
};
use crate::spectra::{ball_dirichlet_eigs, eigenfunction_normal_derivative};
use crate::surface::{
    default_direction_resolution, default_surface_resolution, fibonacci_directions,
    make_direction_grid, make_sphere, DirectionGrid, SurfaceGrid,
};

/// Additive floor in normalized residuals.
const GUARD: f64 = 1e-300;

pub const NECESSITY_TOL: f64 = 1e-8;
pub const ORTHOGONALITY_TOL: f64 = 1e-7;
pub const GREEN_TOL: f64 = 1e-8;
pub const DECOMPOSITION_TOL: f64 = 1e-5;

/// Outcome of one check. `passed` is `residual ≤ tolerance`; a negative
/// control is expected to fail, and [`VerificationReport::ok`] accounts for
/// that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub inputs: serde_json::Value,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub expected_failure: bool,
}

impl VerificationReport {
    pub fn new(check_name: &str, inputs: serde_json::Value, residual: f64, tolerance: f64) -> Self {
        Self {
            check_name: check_name.to_string(),
            inputs,
            residual,
            tolerance,
            passed: residual <= tolerance,
            expected_failure: false,
        }
    }

    /// Mark as a negative control.
    pub fn control(mut self) -> Self {
        self.expected_failure = true;
        self
    }

    /// The check behaved as intended.
    pub fn ok(&self) -> bool {
        self.passed != self.expected_failure
    }

    /// One line of JSON.
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn sphere_radius(grid: &SurfaceGrid, radius: f64) -> Result<()> {
    match grid.shape().sphere_radius() {
        Some(r) if (r - radius).abs() <= 1e-12 * radius => Ok(()),
        _ => Err(Error::UnsupportedSurface(format!(
            "a sphere grid of radius {radius} is required"
        ))),
    }
}

fn l2_norm(grid: &SurfaceGrid, v: &[Complex64]) -> f64 {
    v.iter()
        .zip(&grid.weights)
        .map(|(x, w)| w * x.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Surface grid resolving everything up to wavenumber `k` on a sphere.
pub fn default_sphere_grid(k: f64, radius: f64) -> Result<SurfaceGrid> {
    let (nt, np) = default_surface_resolution(k, radius);
    make_sphere(radius, nt, np)
}

/// `max_β |∫_S u_N e^{ik'β·s} ds| / (‖u_N‖ R)` over `n_directions`
/// Fibonacci directions, with `k' = k_factor · z_{l,n}/R`.
fn necessity_residual(
    idx: HarmonicIndex,
    n: usize,
    radius: f64,
    grid: &SurfaceGrid,
    n_directions: usize,
    k_factor: f64,
) -> Result<f64> {
    sphere_radius(grid, radius)?;
    if n_directions == 0 {
        return Err(Error::InvalidArgument("need at least one direction".into()));
    }
    let k = k_factor * bessel_zero(idx.l, n)? / radius;
    let un = eigenfunction_normal_derivative(idx, n, radius, grid)?;
    let norm = l2_norm(grid, &un);
    if !(norm > 0.0) {
        // the Cauchy-data argument needs u_N ≢ 0
        return Ok(f64::INFINITY);
    }
    let mut worst: f64 = 0.0;
    for beta in fibonacci_directions(n_directions) {
        let trace = plane_wave_trace(k, &beta, grid)?;
        let integral: Complex64 = trace
            .iter()
            .zip(&un)
            .zip(&grid.weights)
            .map(|((e, u), w)| e * u * *w)
            .sum();
        worst = worst.max(integral.norm());
    }
    Ok(worst / (norm * radius))
}

/// The eigenfunction's normal derivative `u_N` annihilates every plane-wave
/// trace at the eigenvalue `k = z_{l,n}/R`.
pub fn check_necessity(
    idx: HarmonicIndex,
    n: usize,
    radius: f64,
    grid: &SurfaceGrid,
    n_directions: usize,
) -> Result<VerificationReport> {
    let r = necessity_residual(idx, n, radius, grid, n_directions, 1.0)?;
    Ok(VerificationReport::new(
        "necessity",
        json!({"l": idx.l, "m": idx.m, "n": n, "R": radius,
               "grid": [grid.descriptor.n_theta, grid.descriptor.n_phi], "directions": n_directions}),
        r,
        NECESSITY_TOL,
    ))
}

/// Same as [`check_necessity`] but with plane waves at `1.01 k`, which is
/// not an eigenvalue; expected to fail.
pub fn check_necessity_control(
    idx: HarmonicIndex,
    n: usize,
    radius: f64,
    grid: &SurfaceGrid,
    n_directions: usize,
) -> Result<VerificationReport> {
    let factor = 1.01;
    let r = necessity_residual(idx, n, radius, grid, n_directions, factor)?;
    Ok(VerificationReport::new(
        "necessity-control",
        json!({"l": idx.l, "m": idx.m, "n": n, "R": radius, "k_factor": factor,
               "grid": [grid.descriptor.n_theta, grid.descriptor.n_phi], "directions": n_directions}),
        r,
        NECESSITY_TOL,
    )
    .control())
}

/// Seeded complex densities with independent uniform `[-1, 1]` parts.
fn random_densities(count: usize, len: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..len)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        })
        .collect()
}

/// `|⟨w|_S, v⟩| / (‖w|_S‖ ‖v‖)` for the Herglotz wave of density `h`.
fn normalized_pairing(a: &CMat, grid: &SurfaceGrid, dirs: &DirectionGrid, h: &[Complex64], v: &[Complex64]) -> f64 {
    // (A g)_m = sqrt(σ_m) w(s_m) with g_j = sqrt(w_j) h_j
    let g: Vec<Complex64> = h.iter().zip(&dirs.weights).map(|(h, w)| h * w.sqrt()).collect();
    let aw = linalg::matvec(a.as_ref(), &g);
    let ip: Complex64 = aw
        .iter()
        .zip(v)
        .zip(&grid.weights)
        .map(|((x, v), w)| x * v.conj() * w.sqrt())
        .sum();
    ip.norm() / (linalg::vec_norm(&aw) * l2_norm(grid, v) + GUARD)
}

fn orthogonality_residual(
    k: f64,
    v: &[Complex64],
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    n_random: usize,
    seed: u64,
) -> Result<f64> {
    let a = assemble_trace_matrix(k, grid, dirs, None)?.boundary;
    Ok(random_densities(n_random, dirs.len(), seed)
        .iter()
        .map(|h| normalized_pairing(&a, grid, dirs, h, v))
        .fold(0.0, f64::max))
}

/// Every Herglotz trace is orthogonal to `v_N` at the eigenvalue
/// `k = z_{l,n}/R`; maximum normalized pairing over seeded random densities.
pub fn check_trace_orthogonality(
    idx: HarmonicIndex,
    n: usize,
    radius: f64,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    n_random: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let k = bessel_zero(idx.l, n)? / radius;
    let vn = eigenfunction_normal_derivative(idx, n, radius, grid)?;
    let r = orthogonality_residual(k, &vn, grid, dirs, n_random, seed)?;
    Ok(VerificationReport::new(
        "trace-orthogonality",
        json!({"l": idx.l, "m": idx.m, "n": n, "R": radius, "seed": seed, "densities": n_random,
               "grid": [grid.descriptor.n_theta, grid.descriptor.n_phi],
               "directions": [dirs.n_theta, dirs.n_phi]}),
        r,
        ORTHOGONALITY_TOL,
    ))
}

/// Off-spectrum control: pairing of random Herglotz traces with `Y_00` at
/// `k`; expected to fail when `j_0(kR) ≠ 0`.
pub fn check_trace_orthogonality_control(
    k: f64,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    n_random: usize,
    seed: u64,
) -> Result<VerificationReport> {
    check_wavenumber(k)?;
    let y00 = harmonic_on_grid(grid, HarmonicIndex { l: 0, m: 0 });
    let r = orthogonality_residual(k, &y00, grid, dirs, n_random, seed)?;
    Ok(VerificationReport::new(
        "trace-orthogonality-control",
        json!({"k": k, "seed": seed, "densities": n_random,
               "grid": [grid.descriptor.n_theta, grid.descriptor.n_phi],
               "directions": [dirs.n_theta, dirs.n_phi]}),
        r,
        ORTHOGONALITY_TOL,
    )
    .control())
}

/// `⟨w|_S, v_N⟩_{L²(S)}` for the Herglotz wave with density `h = Y_{idx}`
/// at `k = z_{l,n}/R` (unnormalized).
pub fn harmonic_density_pairing(
    idx: HarmonicIndex,
    n: usize,
    radius: f64,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
) -> Result<Complex64> {
    let k = bessel_zero(idx.l, n)? / radius;
    let vn = eigenfunction_normal_derivative(idx, n, radius, grid)?;
    let a = assemble_trace_matrix(k, grid, dirs, None)?.boundary;
    let g: Vec<Complex64> = dirs
        .directions
        .iter()
        .zip(&dirs.weights)
        .map(|(b, w)| {
            let (t, p) = geom::angles(b);
            sph_harm(idx, t, p) * w.sqrt()
        })
        .collect();
    let aw = linalg::matvec(a.as_ref(), &g);
    Ok(aw
        .iter()
        .zip(&vn)
        .zip(&grid.weights)
        .map(|((x, v), w)| x * v.conj() * w.sqrt())
        .sum())
}

/// Both sides of Green's identity
/// `∫_D (Δ + k²)F · conj(v) dx = −∫_S ψ · conj(∂_ν v) ds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenTerms {
    /// `∫_D (Δ + k²)F conj(v) dx`.
    pub volume: Complex64,
    /// `∫_S ψ conj(v_N) ds`.
    pub surface: Complex64,
}

/// Green terms for `ψ = Y_F` on the sphere of radius `R`, extended inside
/// as `F = (r/R)^{l_F} Y_F` (so `(Δ + k²)F = k² F`), and the eigenfunction
/// `v = j_{l_v}(kr) Y_v`, `k = z_{l_v,n}/R`.
///
/// The volume integral is a Gauss–Legendre radial quadrature with
/// `n_radial` nodes times the angular integral of `Y_F conj(Y_v)` on `ang`.
pub fn green_terms(
    idx_f: HarmonicIndex,
    idx_v: HarmonicIndex,
    n: usize,
    radius: f64,
    n_radial: usize,
    ang: &DirectionGrid,
) -> Result<GreenTerms> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if n_radial == 0 {
        return Err(Error::InvalidArgument("need at least one radial node".into()));
    }
    let k = bessel_zero(idx_v.l, n)? / radius;
    let angular: Complex64 = ang
        .directions
        .iter()
        .zip(&ang.weights)
        .map(|(b, w)| {
            let (t, p) = geom::angles(b);
            sph_harm(idx_f, t, p) * sph_harm(idx_v, t, p).conj() * *w
        })
        .sum();
    let (r, w) = gauss_legendre_interval(n_radial, 0.0, radius);
    let lf = idx_f.l as i32;
    let radial: f64 = r
        .iter()
        .zip(&w)
        .map(|(r, w)| w * r.powi(lf + 2) * bessel_j_unchecked(idx_v.l, k * r))
        .sum();
    let volume = angular * (k * k * radius.powi(-lf) * radial);
    let surface = angular * (radius * radius * k * bessel_j_deriv_unchecked(idx_v.l, k * radius));
    Ok(GreenTerms { volume, surface })
}

/// `|V + S| / |S|` for the diagonal pair `F = v = idx`.
///
/// The identity checked is `V = −S`: the volume term of `(Δ + k²)F` against
/// the eigenfunction equals minus the boundary term `∫_S ψ v_N`.
pub fn check_green_reduction(
    idx: HarmonicIndex,
    n: usize,
    radius: f64,
    n_radial: usize,
    ang: &DirectionGrid,
) -> Result<VerificationReport> {
    let t = green_terms(idx, idx, n, radius, n_radial, ang)?;
    if t.surface.norm() < 1e-14 {
        return Err(Error::Inconclusive(format!(
            "boundary term {:e} too small to normalize",
            t.surface.norm()
        )));
    }
    Ok(VerificationReport::new(
        "green-reduction",
        json!({"l": idx.l, "m": idx.m, "n": n, "R": radius, "radial_nodes": n_radial,
               "angular": [ang.n_theta, ang.n_phi],
               "volume": [t.volume.re, t.volume.im], "surface": [t.surface.re, t.surface.im]}),
        (t.volume + t.surface).norm() / t.surface.norm(),
        GREEN_TOL,
    ))
}

/// What to decompose in [`check_decomposition`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionTarget {
    /// Seeded random combination of `Y_lm`, `l ≤ 4`.
    RandomBandLimited { seed: u64 },
    Harmonic { l: usize, m: i64 },
}

/// Highest degree of random decomposition targets.
pub const DECOMPOSITION_MAX_DEGREE: usize = 4;

fn decomposition_target(grid: &SurfaceGrid, target: DecompositionTarget) -> Result<Vec<Complex64>> {
    Ok(match target {
        DecompositionTarget::Harmonic { l, m } => harmonic_on_grid(grid, HarmonicIndex::new(l, m)?),
        DecompositionTarget::RandomBandLimited { seed } => {
            let idxs = HarmonicIndex::all_up_to(DECOMPOSITION_MAX_DEGREE);
            let coef = &random_densities(1, idxs.len(), seed)[0];
            let mut psi = vec![Complex64::new(0.0, 0.0); grid.len()];
            for (i, c) in idxs.iter().zip(coef) {
                for (p, y) in psi.iter_mut().zip(harmonic_on_grid(grid, *i)) {
                    *p += c * y;
                }
            }
            psi
        }
    })
}

/// Normal derivatives of all ball eigenfunctions with eigenvalue `k`
/// (within relative `1e-9`); empty off the spectrum.
pub fn eigen_normal_derivatives_at(k: f64, radius: f64, grid: &SurfaceGrid) -> Result<Vec<Vec<Complex64>>> {
    let mut out = Vec::new();
    for rec in ball_dirichlet_eigs(radius, k * (1.0 + 1e-9))? {
        if (rec.k - k).abs() > 1e-9 * k {
            continue;
        }
        let (l, n) = (rec.l.expect("ball record"), rec.n.expect("ball record"));
        for m in -(l as i64)..=(l as i64) {
            out.push(eigenfunction_normal_derivative(HarmonicIndex::new(l, m)?, n, radius, grid)?);
        }
    }
    Ok(out)
}

/// Relative residual of projecting `ψ` onto the traces, plus the `v_N` of
/// every eigenfunction at `k` when `adjoin_normal_derivatives` is set.
pub fn check_decomposition(
    k: f64,
    radius: f64,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    target: DecompositionTarget,
    adjoin_normal_derivatives: bool,
) -> Result<VerificationReport> {
    sphere_radius(grid, radius)?;
    let psi = decomposition_target(grid, target)?;
    let b: Vec<Complex64> = psi.iter().zip(&grid.weights).map(|(p, w)| p * w.sqrt()).collect();
    let b_norm = linalg::vec_norm(&b);
    if !(b_norm > 1e-300) {
        return Err(Error::Inconclusive("zero target".into()));
    }
    let traces = assemble_trace_matrix(k, grid, dirs, None)?.boundary;
    let extra = if adjoin_normal_derivatives {
        eigen_normal_derivatives_at(k, radius, grid)?
    } else {
        Vec::new()
    };
    let nt = traces.ncols();
    let a = CMat::from_fn(grid.len(), nt + extra.len(), |i, j| {
        if j < nt {
            traces[(i, j)]
        } else {
            extra[j - nt][i] * grid.weights[i].sqrt()
        }
    });
    let smax = linalg::singular_values(a.as_ref())?.first().copied().unwrap_or(0.0);
    let sol = linalg::solve_ridge(a.as_ref(), &b, 1e-12 * smax * smax)?;
    let r: Vec<Complex64> = sol.fitted.iter().zip(&b).map(|(x, y)| x - y).collect();
    Ok(VerificationReport::new(
        "decomposition",
        json!({"k": k, "R": radius, "target": target, "normal_derivatives": extra.len(),
               "grid": [grid.descriptor.n_theta, grid.descriptor.n_phi],
               "directions": [dirs.n_theta, dirs.n_phi]}),
        linalg::vec_norm(&r) / b_norm,
        DECOMPOSITION_TOL,
    ))
}

/// The full set of checks behind the `verify` subcommand.
pub fn standard_suite(seed: u64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for radius in [0.7, 1.0, 2.0] {
        for l in 0..=3usize {
            for n in 1..=2usize {
                let k = bessel_zero(l, n)? / radius;
                let grid = default_sphere_grid(k * 1.01, radius)?;
                for m in [-(l as i64), 0, l as i64] {
                    let idx = HarmonicIndex::new(l, m)?;
                    out.push(check_necessity(idx, n, radius, &grid, 50)?);
                    if m == 0 {
                        out.push(check_necessity_control(idx, n, radius, &grid, 50)?);
                    }
                }
            }
        }
    }
    for l in 0..=2usize {
        for n in 1..=2usize {
            let k = bessel_zero(l, n)?;
            let grid = default_sphere_grid(k, 1.0)?;
            let (dt, dp) = default_direction_resolution(k, 1.0);
            let dirs = make_direction_grid(dt, dp)?;
            for m in -(l as i64)..=(l as i64) {
                out.push(check_trace_orthogonality(HarmonicIndex::new(l, m)?, n, 1.0, &grid, &dirs, 20, seed)?);
            }
        }
    }
    let grid = default_sphere_grid(1.0, 1.0)?;
    let (dt, dp) = default_direction_resolution(1.0, 1.0);
    let dirs = make_direction_grid(dt, dp)?;
    out.push(check_trace_orthogonality_control(1.0, &grid, &dirs, 20, seed)?);
    let ang = make_direction_grid(16, 32)?;
    for l in 0..=3usize {
        for n in 1..=2usize {
            for m in [-(l as i64), 0, l as i64] {
                out.push(check_green_reduction(HarmonicIndex::new(l, m)?, n, 1.0, 64, &ang)?);
            }
        }
    }
    let grid = default_sphere_grid(PI, 1.0)?;
    let dirs = make_direction_grid(14, 28)?;
    out.push(check_decomposition(1.0, 1.0, &grid, &dirs, DecompositionTarget::RandomBandLimited { seed }, true)?);
    let y00 = DecompositionTarget::Harmonic { l: 0, m: 0 };
    out.push(check_decomposition(PI, 1.0, &grid, &dirs, y00, true)?);
    let mut traces_only = check_decomposition(PI, 1.0, &grid, &dirs, y00, false)?;
    traces_only.check_name = "decomposition-traces-only".into();
    out.push(traces_only.control());
    Ok(out)
}
