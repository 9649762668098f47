//! Plane-wave traces, Herglotz superpositions and least-squares fits against
//! the span of plane-wave traces.
//!
//! A Herglotz wave is `w(x) = ∫_{S²} h(β) e^{ik β·x} dβ`, discretized with
//! the weights of a [`DirectionGrid`]. Every such wave solves the Helmholtz
//! equation in all of space.

use std::io::Write;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, check_wavenumber, Error, Result};
use crate::geom::{self, Point3};
use crate::linalg::{self, CMat};
use crate::specfun::{bessel_j_unchecked, sph_harm, HarmonicIndex};
use crate::surface::{DirectionGrid, InteriorPoints, SurfaceGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
fn plane_wave(k: f64, beta: &Point3, x: &Point3) -> Complex64 {
    Complex64::from_polar(1.0, k * geom::dot(beta, x))
}

fn check_unit(beta: &Point3) -> Result<()> {
    let n = geom::norm(beta);
    if (n - 1.0).abs() > 1e-10 || !n.is_finite() {
        return Err(Error::InvalidDirection(n));
    }
    Ok(())
}

/// Values `e^{ik β·s_m}` at every node of `grid`.
pub fn plane_wave_trace(k: f64, beta: &Point3, grid: &SurfaceGrid) -> Result<Vec<Complex64>> {
    check_wavenumber(k)?;
    check_unit(beta)?;
    Ok(grid.nodes.iter().map(|s| plane_wave(k, beta, s)).collect())
}

/// Coefficients `h_j` of a density on the directions of a [`DirectionGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HerglotzDensity {
    pub coefficients: Vec<Complex64>,
}

impl HerglotzDensity {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("density has non-finite entries".into()));
        }
        Ok(Self { coefficients })
    }

    /// Density `h(β) = f(β)` sampled on the grid directions.
    pub fn from_fn(dirs: &DirectionGrid, f: impl Fn(&Point3) -> Complex64) -> Self {
        Self {
            coefficients: dirs.directions.iter().map(f).collect(),
        }
    }

    /// `h = Y_lm(β)`.
    pub fn harmonic(dirs: &DirectionGrid, idx: HarmonicIndex) -> Self {
        Self::from_fn(dirs, |b| {
            let (t, p) = geom::angles(b);
            sph_harm(idx, t, p)
        })
    }

    pub fn constant(dirs: &DirectionGrid, value: Complex64) -> Self {
        Self {
            coefficients: vec![value; dirs.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Discrete `L²(S²)` norm `sqrt(Σ w_j |h_j|²)`.
    pub fn l2_norm(&self, dirs: &DirectionGrid) -> Result<f64> {
        check_len(dirs.len(), self.len())?;
        Ok(self
            .coefficients
            .iter()
            .zip(&dirs.weights)
            .map(|(h, w)| w * h.norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

/// `w(x) = Σ_j w_j h_j e^{ik β_j·x}` at each point.
pub fn herglotz_eval(
    k: f64,
    density: &HerglotzDensity,
    dirs: &DirectionGrid,
    points: &[Point3],
) -> Result<Vec<Complex64>> {
    check_wavenumber(k)?;
    check_len(dirs.len(), density.len())?;
    let amps: Vec<Complex64> = density
        .coefficients
        .iter()
        .zip(&dirs.weights)
        .map(|(h, w)| h * *w)
        .collect();
    Ok(points
        .iter()
        .map(|x| {
            dirs.directions
                .iter()
                .zip(&amps)
                .map(|(b, a)| a * plane_wave(k, b, x))
                .sum()
        })
        .collect())
}

/// `|(Δ_h + k²) w(point)|` with the 7-point second-order Laplacian.
pub fn helmholtz_residual(
    k: f64,
    density: &HerglotzDensity,
    dirs: &DirectionGrid,
    point: &Point3,
    h_step: f64,
) -> Result<f64> {
    if !(h_step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h_step}")));
    }
    let mut stencil = vec![*point];
    for axis in 0..3 {
        for sign in [-1.0, 1.0] {
            let mut p = *point;
            p[axis] += sign * h_step;
            stencil.push(p);
        }
    }
    let w = herglotz_eval(k, density, dirs, &stencil)?;
    let lap = (w[1..].iter().sum::<Complex64>() - w[0] * 6.0) / (h_step * h_step);
    Ok((lap + w[0] * (k * k)).norm())
}

/// Weighted plane-wave matrix at fixed `k`.
///
/// Boundary entry `(m, j)` is `sqrt(σ_m) e^{ik β_j·s_m} sqrt(w_j)`; interior
/// rows use the uniform weight of the [`InteriorPoints`] in place of
/// `sqrt(σ_m)`.
#[derive(Debug, Clone)]
pub struct TraceMatrix {
    pub k: f64,
    pub boundary: CMat,
    pub interior: Option<CMat>,
}

impl TraceMatrix {
    pub fn nrows(&self) -> usize {
        self.boundary.nrows() + self.interior.as_ref().map_or(0, |m| m.nrows())
    }

    pub fn ncols(&self) -> usize {
        self.boundary.ncols()
    }

    /// `[boundary; interior]`.
    pub fn stacked(&self) -> CMat {
        match &self.interior {
            Some(int) => linalg::vstack(self.boundary.as_ref(), int.as_ref()),
            None => self.boundary.clone(),
        }
    }

    /// `A^H A` of the boundary block.
    pub fn gram(&self) -> CMat {
        self.boundary.adjoint() * &self.boundary
    }

    /// Row-major CSV, one matrix row per line, complex entries as
    /// interleaved `re,im`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let a = self.stacked();
        for i in 0..a.nrows() {
            let line: Vec<String> = (0..a.ncols())
                .flat_map(|j| {
                    let v = a[(i, j)];
                    [format!("{:.17e}", v.re), format!("{:.17e}", v.im)]
                })
                .collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Little-endian binary dump: magic `PWTM`, `u64` rows, `u64` cols,
    /// then row-major interleaved `f64` real/imaginary parts.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let a = self.stacked();
        out.write_all(b"PWTM")?;
        out.write_all(&(a.nrows() as u64).to_le_bytes())?;
        out.write_all(&(a.ncols() as u64).to_le_bytes())?;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let v = a[(i, j)];
                out.write_all(&v.re.to_le_bytes())?;
                out.write_all(&v.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Inverse of [`TraceMatrix::write_binary`]; returns the stacked matrix.
    pub fn read_binary(bytes: &[u8]) -> Result<CMat> {
        let bad = || Error::InvalidArgument("not a PWTM dump".into());
        if bytes.len() < 20 || &bytes[..4] != b"PWTM" {
            return Err(bad());
        }
        let rows = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
        let cols = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
        if bytes.len() != 20 + 16 * rows * cols {
            return Err(bad());
        }
        let f = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        Ok(Mat::from_fn(rows, cols, |i, j| {
            let off = 20 + 16 * (i * cols + j);
            Complex64::new(f(off), f(off + 8))
        }))
    }
}

/// Assemble the weighted trace matrix (and optional interior block).
pub fn assemble_trace_matrix(
    k: f64,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    interior: Option<&InteriorPoints>,
) -> Result<TraceMatrix> {
    check_wavenumber(k)?;
    let col_w: Vec<f64> = dirs.weights.iter().map(|w| w.sqrt()).collect();
    let row_w: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let boundary = Mat::from_fn(grid.len(), dirs.len(), |m, j| {
        plane_wave(k, &dirs.directions[j], &grid.nodes[m]) * (row_w[m] * col_w[j])
    });
    let interior = interior.map(|int| {
        Mat::from_fn(int.len(), dirs.len(), |p, j| {
            plane_wave(k, &dirs.directions[j], &int.points[p]) * (int.weight * col_w[j])
        })
    });
    Ok(TraceMatrix {
        k,
        boundary,
        interior,
    })
}

/// Closed form of `∫_{|s|=R} Y_lm(ŝ) e^{ik β·s} ds = 4π R² i^l j_l(kR) Y_lm(β)`.
///
/// The factor multiplying `4π R² i^l j_l(kR)` is `Y_lm(β)` itself, not its
/// conjugate; the unit tests pin this against direct quadrature.
pub fn funk_hecke(idx: HarmonicIndex, k: f64, radius: f64, beta: &Point3) -> Result<Complex64> {
    check_wavenumber(k)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    check_unit(beta)?;
    let (t, p) = geom::angles(beta);
    let il = I.powu(idx.l as u32);
    Ok(il * (4.0 * std::f64::consts::PI * radius * radius * bessel_j_unchecked(idx.l, k * radius))
        * sph_harm(idx, t, p))
}

/// Outcome of [`fit_trace`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceFit {
    /// `‖A g − b‖ / ‖b‖` with `b = target · sqrt(σ)`.
    pub residual: f64,
    pub density: HerglotzDensity,
    pub density_norm: f64,
    pub ridge: f64,
}

/// Default Tikhonov parameter `1e-12 ‖A‖²`.
pub fn default_ridge(a: &TraceMatrix) -> Result<f64> {
    let s = linalg::singular_values(a.boundary.as_ref())?;
    Ok(1e-12 * s.first().copied().unwrap_or(0.0).powi(2))
}

/// Least-squares distance from `target` to the span of plane-wave traces.
///
/// Solves `min ‖A g − target √σ‖² + ridge ‖g‖²` over `g_j = sqrt(w_j) h_j`.
/// `ridge = None` selects [`default_ridge`]; `Some(0.0)` selects the
/// truncated pseudo-inverse.
///
/// The pairing is the usual sesquilinear one. Totality defined through the
/// bilinear pairing `∫ f e^{ikβ·s} ds` fails for exactly the same `k`,
/// because the trace family is closed under conjugation (`β ↦ −β`).
pub fn fit_trace(
    k: f64,
    target: &[Complex64],
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    ridge: Option<f64>,
) -> Result<TraceFit> {
    check_len(grid.len(), target.len())?;
    let b: Vec<Complex64> = target
        .iter()
        .zip(&grid.weights)
        .map(|(t, w)| t * w.sqrt())
        .collect();
    let b_norm = linalg::vec_norm(&b);
    if !(b_norm > 0.0) {
        return Err(Error::InvalidArgument(
            "zero target: relative residual undefined".into(),
        ));
    }
    let a = assemble_trace_matrix(k, grid, dirs, None)?;
    let ridge = match ridge {
        Some(r) => r,
        None => default_ridge(&a)?,
    };
    let sol = linalg::solve_ridge(a.boundary.as_ref(), &b, ridge)?;
    let g = sol.x;
    let r: Vec<Complex64> = sol.fitted.iter().zip(&b).map(|(x, y)| x - y).collect();
    let h: Vec<Complex64> = g
        .iter()
        .zip(&dirs.weights)
        .map(|(g, w)| g / w.sqrt())
        .collect();
    Ok(TraceFit {
        residual: linalg::vec_norm(&r) / b_norm,
        density_norm: linalg::vec_norm(&g),
        density: HerglotzDensity { coefficients: h },
        ridge,
    })
}

/// Samples of `Y_lm` at the parameter directions of a surface grid.
pub fn harmonic_on_grid(grid: &SurfaceGrid, idx: HarmonicIndex) -> Vec<Complex64> {
    grid.params.iter().map(|(t, p)| sph_harm(idx, *t, *p)).collect()
}
