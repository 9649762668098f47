//! Dirichlet eigenvalue oracles: the analytic ball spectrum and a Nyström
//! discretization of the single-layer operator, whose kernel degenerates at
//! interior Dirichlet eigenvalues.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_wavenumber, Error, Result};
use crate::geom::{self, Point3};
use crate::linalg::{self, CMat};
use crate::specfun::{
    bessel_j_deriv_unchecked, bessel_j_unchecked, bessel_zero, gauss_legendre_interval, sph_bessel_y, sph_harm,
    HarmonicIndex, MAX_DEGREE,
};
use crate::surface::{SurfaceGrid, SurfaceShape};
use crate::sweep::{self, Indicator, IndicatorKind, SweepResult};

/// Where an eigenvalue came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenSource {
    BallAnalytic,
    TraceSweep,
    SingleLayer,
}

/// A Dirichlet eigenvalue `k²`, stored as `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub k: f64,
    pub l: Option<usize>,
    pub n: Option<usize>,
    pub multiplicity: usize,
    pub source: EigenSource,
}

/// JSON array of records.
pub fn eigs_to_json(records: &[EigenvalueRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)?)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    Ok(())
}

/// All `k = z_{l,n}/R ≤ k_max`, ascending, with multiplicity `2l+1`.
///
/// Degrees are scanned while `l < k_max R`, which is enough since
/// `z_{l,1} > l`.
pub fn ball_dirichlet_eigs(radius: f64, k_max: f64) -> Result<Vec<EigenvalueRecord>> {
    check_radius(radius)?;
    check_wavenumber(k_max)?;
    let x_max = k_max * radius;
    let mut out = Vec::new();
    let mut l = 0usize;
    while (l as f64) < x_max {
        if l > MAX_DEGREE {
            return Err(Error::Domain(format!(
                "k_max·R = {x_max} needs degrees above {MAX_DEGREE}"
            )));
        }
        let mut n = 1;
        loop {
            let z = bessel_zero(l, n)?;
            if z > x_max {
                break;
            }
            out.push(EigenvalueRecord {
                k: z / radius,
                l: Some(l),
                n: Some(n),
                multiplicity: 2 * l + 1,
                source: EigenSource::BallAnalytic,
            });
            n += 1;
        }
        if n == 1 {
            break;
        }
        l += 1;
    }
    out.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok(out)
}

/// `u(x) = j_l(k|x|) Y_lm(x̂)` with `k = z_{l,n}/R`.
pub fn ball_eigenfunction(
    idx: HarmonicIndex,
    n: usize,
    radius: f64,
    points: &[Point3],
) -> Result<Vec<Complex64>> {
    check_radius(radius)?;
    let k = bessel_zero(idx.l, n)? / radius;
    points
        .iter()
        .map(|x| {
            let r = geom::norm(x);
            if r > radius * (1.0 + 1e-12) {
                return Err(Error::Domain(format!("point at radius {r} outside ball {radius}")));
            }
            let (t, p) = geom::angles(x);
            Ok(sph_harm(idx, t, p) * bessel_j_unchecked(idx.l, k * r))
        })
        .collect()
}

fn sphere_radius_of(grid: &SurfaceGrid) -> Result<f64> {
    grid.shape()
        .sphere_radius()
        .ok_or_else(|| Error::UnsupportedSurface("a sphere grid is required".into()))
}

/// `∂_ν u = k j_l'(kR) Y_lm(ŝ)` at every node of a sphere grid.
pub fn eigenfunction_normal_derivative(
    idx: HarmonicIndex,
    n: usize,
    radius: f64,
    grid: &SurfaceGrid,
) -> Result<Vec<Complex64>> {
    check_radius(radius)?;
    let r = sphere_radius_of(grid)?;
    if (r - radius).abs() > 1e-12 * radius {
        return Err(Error::UnsupportedSurface(format!(
            "grid radius {r} differs from R = {radius}"
        )));
    }
    let k = bessel_zero(idx.l, n)? / radius;
    let amp = k * bessel_j_deriv_unchecked(idx.l, k * radius);
    Ok(grid
        .nodes
        .iter()
        .map(|s| {
            let (t, p) = geom::angles(s);
            sph_harm(idx, t, p) * amp
        })
        .collect())
}

/// `λ_l = i k R² j_l(kR) h_l^{(1)}(kR)`, the eigenvalue of the single-layer
/// operator on the sphere of radius `R` for degree `l`.
pub fn single_layer_symbol(l: usize, k: f64, radius: f64) -> Result<Complex64> {
    check_wavenumber(k)?;
    check_radius(radius)?;
    let x = k * radius;
    let j = bessel_j_unchecked(l, x);
    let y = sph_bessel_y(l, x)?;
    Ok(Complex64::new(0.0, k * radius * radius * j) * Complex64::new(j, y))
}

/// How the weakly singular static part of the diagonal is integrated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelfTerm {
    /// `1/(4πr)` integrated over a flat disk of area `σ_m`: `ρ_m/2` with
    /// `ρ_m = sqrt(σ_m/π)`. First-order accurate.
    FlatPatch,
    /// `I(x_m) − Σ_{n≠m} σ_n/(4π|x_m − x_n|)`, where `I(x) = ∫_S 1/(4π|x−y|) dy`
    /// is computed accurately, so the static operator is exact on constants.
    #[default]
    Subtracted,
}

/// `∫_S 1/(4π|x − y|) dS_y` for a point `x` on a star-shaped surface.
///
/// Uses spherical coordinates whose pole is the direction of `x`; the area
/// element `sin θ'` cancels the `1/|x − y|` singularity, so Gauss–Legendre
/// in `θ'` and the trapezoidal rule in `φ'` converge spectrally.
pub fn unit_density_potential(shape: &SurfaceShape, x: &Point3, n_theta: usize, n_phi: usize) -> f64 {
    match shape.sphere_radius() {
        Some(r) => r,
        None => potential_by_quadrature(shape, x, n_theta, n_phi),
    }
}

fn potential_by_quadrature(shape: &SurfaceShape, x: &Point3, n_theta: usize, n_phi: usize) -> f64 {
    let dir = geom::scale(x, 1.0 / geom::norm(x));
    let axis = geom::cross(&[0.0, 0.0, 1.0], &dir);
    let rot = if geom::norm(&axis) < 1e-14 {
        if dir[2] > 0.0 {
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        } else {
            [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]
        }
    } else {
        geom::rotation_matrix(&axis, dir[2].clamp(-1.0, 1.0).acos())
    };
    let (tn, tw) = gauss_legendre_interval(n_theta, 0.0, PI);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut sum = 0.0;
    for (t, w) in tn.iter().zip(&tw) {
        let st = t.sin();
        for j in 0..n_phi {
            let local = geom::unit_from_angles(*t, j as f64 * dphi);
            let omega = geom::rotate(&rot, &local);
            let (th, ph) = geom::angles(&omega);
            let (r, jac) = shape.area_per_solid_angle(th, ph);
            let y = geom::scale(&omega, r);
            sum += w * st * jac / geom::norm(&geom::sub(x, &y));
        }
    }
    sum * dphi / (4.0 * PI)
}

/// Static diagonal terms of the Nyström matrix, independent of `k`.
pub fn static_self_terms(grid: &SurfaceGrid, mode: SelfTerm) -> Vec<f64> {
    let c = 1.0 / (4.0 * PI);
    match mode {
        SelfTerm::FlatPatch => grid.weights.iter().map(|w| (w / PI).sqrt() / 2.0).collect(),
        SelfTerm::Subtracted => {
            let nt = grid.descriptor.n_theta.max(16);
            let np = grid.descriptor.n_phi.max(32);
            (0..grid.len())
                .map(|m| {
                    let xm = &grid.nodes[m];
                    let off: f64 = (0..grid.len())
                        .filter(|&n| n != m)
                        .map(|n| grid.weights[n] * c / geom::norm(&geom::sub(xm, &grid.nodes[n])))
                        .sum();
                    unit_density_potential(grid.shape(), xm, nt, np) - off
                })
                .collect()
        }
    }
}

/// Nyström discretization of the single-layer operator on one grid; the
/// `k`-independent diagonal terms are computed once.
///
/// With a band limit `L`, the operator is also compressed onto the span of
/// `sqrt(σ) Y_lm(θ, φ)`, `l ≤ L` (orthonormalized), where `(θ, φ)` are the
/// grid parameters. The compressed matrix drops the high-frequency modes
/// whose tiny single-layer eigenvalues would otherwise set `σ_min` at every
/// `k`; the Gauss–Legendre grid supports very high angular frequencies on
/// its short rings near the poles.
#[derive(Debug, Clone)]
pub struct SingleLayerOperator<'a> {
    pub grid: &'a SurfaceGrid,
    pub self_term: SelfTerm,
    pub band_limit: Option<usize>,
    static_diag: Vec<f64>,
    basis: Option<CMat>,
}

/// Band limit `max(⌈k_max ρ⌉ + 4, 8)` for sweeps up to `k_max` on a surface
/// of outer radius `ρ`.
pub fn default_band_limit(k_max: f64, outer_radius: f64) -> usize {
    ((k_max * outer_radius).ceil() as usize + 4).max(8)
}

impl<'a> SingleLayerOperator<'a> {
    pub fn new(grid: &'a SurfaceGrid, self_term: SelfTerm) -> Self {
        Self {
            grid,
            self_term,
            band_limit: None,
            static_diag: static_self_terms(grid, self_term),
            basis: None,
        }
    }

    /// Compress onto harmonics of degree `≤ l_max`.
    pub fn with_band_limit(mut self, l_max: usize) -> Result<Self> {
        let idxs = HarmonicIndex::all_up_to(l_max.min(MAX_DEGREE));
        if idxs.len() > self.grid.len() {
            return Err(Error::InvalidArgument(format!(
                "band limit {l_max} needs {} basis functions but the grid has {} nodes",
                idxs.len(),
                self.grid.len()
            )));
        }
        let g = self.grid;
        let phi = Mat::from_fn(g.len(), idxs.len(), |m, c| {
            let (t, p) = g.params[m];
            sph_harm(idxs[c], t, p) * g.weights[m].sqrt()
        });
        self.basis = Some(phi.qr().compute_thin_Q());
        self.band_limit = Some(l_max);
        Ok(self)
    }

    /// Symmetrically weighted matrix at wavenumber `k`.
    ///
    /// Entry `(m, n)` is `sqrt(σ_m) e^{ik r}/(4π r) sqrt(σ_n)`,
    /// `r = |x_m − x_n|`. This is the Nyström matrix `G diag(σ)` conjugated
    /// by `diag(sqrt(σ))`, so it has the same eigenvalues and is complex
    /// symmetric. The diagonal is `ik σ_m/(4π)` (the continuous extension of
    /// `(e^{ikr} − 1)/(4πr)`) plus the static term selected by
    /// [`SelfTerm`].
    pub fn matrix(&self, k: f64) -> Result<CMat> {
        check_wavenumber(k)?;
        let grid = self.grid;
        let sq: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
        let n = grid.len();
        let c = 1.0 / (4.0 * PI);
        let mut a = Mat::<Complex64>::zeros(n, n);
        for j in 0..n {
            let xj = &grid.nodes[j];
            for i in 0..j {
                let r = geom::norm(&geom::sub(&grid.nodes[i], xj));
                let v = Complex64::from_polar(c / r, k * r) * (sq[i] * sq[j]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
            a[(j, j)] = Complex64::new(self.static_diag[j], k * grid.weights[j] * c);
        }
        Ok(a)
    }

    /// `Qᴴ A Q` for the band-limited basis `Q`, or the full matrix without
    /// a band limit.
    pub fn compressed(&self, k: f64) -> Result<CMat> {
        let a = self.matrix(k)?;
        Ok(match &self.basis {
            Some(q) => q.adjoint() * (&a * q),
            None => a,
        })
    }

    /// Singular values of [`SingleLayerOperator::compressed`], descending.
    pub fn singular_values(&self, k: f64) -> Result<Vec<f64>> {
        linalg::singular_values(self.compressed(k)?.as_ref())
    }
}

/// [`SingleLayerOperator::matrix`] with the default [`SelfTerm`].
pub fn single_layer_matrix(k: f64, grid: &SurfaceGrid) -> Result<CMat> {
    check_wavenumber(k)?;
    SingleLayerOperator::new(grid, SelfTerm::default()).matrix(k)
}

/// `σ_min` of the (compressed) single-layer matrix as a function of `k`.
impl Indicator for SingleLayerOperator<'_> {
    fn value(&self, k: f64) -> Result<f64> {
        if self.basis.is_none() {
            return linalg::smallest_singular_value(self.matrix(k)?.as_ref());
        }
        Ok(self.singular_values(k)?.last().copied().unwrap_or(0.0))
    }

    fn multiplicity(&self, k: f64, gap_ratio: f64) -> Result<usize> {
        Ok(sweep::count_below_median(&self.singular_values(k)?, gap_ratio))
    }

    fn kind(&self) -> IndicatorKind {
        IndicatorKind::SingleLayer
    }
}

/// Sweep `σ_min` of the single-layer matrix, compressed with
/// [`default_band_limit`] for `k_hi`, and resolve its dips.
pub fn single_layer_eig_sweep(
    k_lo: f64,
    k_hi: f64,
    n_samples: usize,
    grid: &SurfaceGrid,
    options: &sweep::SweepOptions,
) -> Result<SweepResult> {
    check_wavenumber(k_hi)?;
    let outer = grid.nodes.iter().map(geom::norm).fold(0.0, f64::max);
    let l_max = default_band_limit(k_hi, outer);
    let ind = SingleLayerOperator::new(grid, SelfTerm::default()).with_band_limit(l_max)?;
    let mut config = sweep::SweepConfig::for_grid(grid, None, None);
    config.band_limit = Some(l_max);
    sweep::run_sweep(&ind, k_lo, k_hi, n_samples, options, config)
}
