//! Product-rule quadratures on star-shaped closed surfaces and on the unit
//! direction sphere.
//!
//! Both grids use Gauss–Legendre nodes in `cos θ` times uniform nodes in
//! `φ`. Node `(i, j)` lives at flat index `i * n_phi + j`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::geom::{self, Point3};
use crate::specfun::{gauss_legendre, sph_harm_with_dtheta, HarmonicIndex};

/// One term `ε · Re Y_lm` of a star-shaped radius perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationTerm {
    pub index: HarmonicIndex,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceShape {
    Sphere {
        radius: f64,
    },
    /// `r(θ, φ) = R0 (1 + Σ ε Re Y_lm(θ, φ))`
    Star {
        base_radius: f64,
        perturbation: Vec<PerturbationTerm>,
    },
}

impl SurfaceShape {
    /// Radius of the surface along direction `(θ, φ)`.
    pub fn radius(&self, theta: f64, phi: f64) -> f64 {
        self.radius_with_derivatives(theta, phi).0
    }

    /// `(r, ∂r/∂θ, ∂r/∂φ)` from closed-form harmonic derivatives.
    pub fn radius_with_derivatives(&self, theta: f64, phi: f64) -> (f64, f64, f64) {
        match self {
            SurfaceShape::Sphere { radius } => (*radius, 0.0, 0.0),
            SurfaceShape::Star {
                base_radius,
                perturbation,
            } => {
                let (mut r, mut rt, mut rp) = (1.0, 0.0, 0.0);
                for term in perturbation {
                    let (y, dy) = sph_harm_with_dtheta(term.index, theta, phi);
                    r += term.coefficient * y.re;
                    rt += term.coefficient * dy.re;
                    // Re(i m Y) = -m Im Y
                    rp -= term.coefficient * term.index.m as f64 * y.im;
                }
                (base_radius * r, base_radius * rt, base_radius * rp)
            }
        }
    }

    /// `(r, dS/dω)`: radius and surface area per unit solid angle along
    /// direction `(θ, φ)`.
    pub fn area_per_solid_angle(&self, theta: f64, phi: f64) -> (f64, f64) {
        let (r, rt, rp) = self.radius_with_derivatives(theta, phi);
        // r_φ carries a factor sin^|m| θ, so the quotient stays bounded
        let st = theta.sin().max(1e-300);
        let g = rt / r;
        let h = rp / (r * st);
        (r, r * r * (1.0 + g * g + h * h).sqrt())
    }

    /// Radius of the ball this shape is, if it is one.
    pub fn sphere_radius(&self) -> Option<f64> {
        match self {
            SurfaceShape::Sphere { radius } => Some(*radius),
            SurfaceShape::Star {
                base_radius,
                perturbation,
            } if perturbation.iter().all(|t| t.coefficient == 0.0) => Some(*base_radius),
            _ => None,
        }
    }

    /// A characteristic length (ball radius or base radius).
    pub fn reference_radius(&self) -> f64 {
        match self {
            SurfaceShape::Sphere { radius } => *radius,
            SurfaceShape::Star { base_radius, .. } => *base_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDescriptor {
    pub shape: SurfaceShape,
    pub n_theta: usize,
    pub n_phi: usize,
}

/// Quadrature discretization of a closed surface: nodes, area weights and
/// outward unit normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    pub descriptor: SurfaceDescriptor,
    pub nodes: Vec<Point3>,
    pub weights: Vec<f64>,
    pub normals: Vec<Point3>,
    /// Parameter angles `(θ, φ)` of each node.
    pub params: Vec<(f64, f64)>,
}

impl SurfaceGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn shape(&self) -> &SurfaceShape {
        &self.descriptor.shape
    }

    /// Total area, `Σ σ_m`.
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Enclosed volume from the divergence theorem, `(1/3) ∫ s·N ds`.
    pub fn volume(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.normals)
            .zip(&self.weights)
            .map(|((s, n), w)| geom::dot(s, n) * w)
            .sum::<f64>()
            / 3.0
    }

    /// Ratio `|x| / r(x̂)`; points with ratio < 1 lie inside the star domain.
    pub fn radial_fraction(&self, x: &Point3) -> f64 {
        let r = geom::norm(x);
        if r == 0.0 {
            return 0.0;
        }
        let (t, p) = geom::angles(x);
        r / self.shape().radius(t, p)
    }

    /// Rebuild a grid from its descriptor.
    pub fn from_descriptor(desc: &SurfaceDescriptor) -> Result<Self> {
        match &desc.shape {
            SurfaceShape::Sphere { radius } => make_sphere(*radius, desc.n_theta, desc.n_phi),
            SurfaceShape::Star {
                base_radius,
                perturbation,
            } => make_star_surface(*base_radius, perturbation, desc.n_theta, desc.n_phi),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_sizes(n_theta: usize, n_phi: usize) -> Result<()> {
    if n_theta < 4 || n_phi < 8 {
        return Err(Error::InvalidArgument(format!(
            "grid too coarse: n_theta = {n_theta} (min 4), n_phi = {n_phi} (min 8)"
        )));
    }
    Ok(())
}

/// Sphere of radius `R` centered at the origin.
pub fn make_sphere(radius: f64, n_theta: usize, n_phi: usize) -> Result<SurfaceGrid> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    check_sizes(n_theta, n_phi)?;
    let (x, w) = gauss_legendre(n_theta);
    let dphi = TAU / n_phi as f64;
    let n = n_theta * n_phi;
    let mut grid = SurfaceGrid {
        descriptor: SurfaceDescriptor {
            shape: SurfaceShape::Sphere { radius },
            n_theta,
            n_phi,
        },
        nodes: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        params: Vec::with_capacity(n),
    };
    for (xi, wi) in x.iter().zip(&w) {
        let theta = xi.acos();
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            let e = geom::unit_from_angles(theta, phi);
            grid.nodes.push(geom::scale(&e, radius));
            grid.normals.push(e);
            grid.weights.push(radius * radius * wi * dphi);
            grid.params.push((theta, phi));
        }
    }
    Ok(grid)
}

/// Star-shaped surface `r = R0 (1 + Σ ε Re Y_lm)`.
///
/// Area elements and normals come from `x_θ × x_φ` of the analytic
/// parametrization. The radius must stay above `0.2 R0` at every node.
pub fn make_star_surface(
    base_radius: f64,
    perturbation: &[PerturbationTerm],
    n_theta: usize,
    n_phi: usize,
) -> Result<SurfaceGrid> {
    if !(base_radius.is_finite() && base_radius > 0.0) {
        return Err(Error::DegenerateSurface(format!(
            "base radius must be positive, got {base_radius}"
        )));
    }
    check_sizes(n_theta, n_phi)?;
    if perturbation.iter().any(|t| !t.coefficient.is_finite()) {
        return Err(Error::InvalidArgument("non-finite perturbation coefficient".into()));
    }
    let shape = SurfaceShape::Star {
        base_radius,
        perturbation: perturbation.to_vec(),
    };
    let (x, w) = gauss_legendre(n_theta);
    let dphi = TAU / n_phi as f64;
    let n = n_theta * n_phi;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut params = Vec::with_capacity(n);
    for (xi, wi) in x.iter().zip(&w) {
        let theta = xi.acos();
        let st = theta.sin();
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            let (r, rt, rp) = shape.radius_with_derivatives(theta, phi);
            if !(r >= 0.2 * base_radius) {
                return Err(Error::DegenerateSurface(format!(
                    "radius {r:.4} at (θ = {theta:.4}, φ = {phi:.4}) is below 0.2 R0"
                )));
            }
            let e_r = geom::unit_from_angles(theta, phi);
            let (sp, cp) = phi.sin_cos();
            let e_t = [theta.cos() * cp, theta.cos() * sp, -st];
            let e_p = [-sp, cp, 0.0];
            // x_θ × x_φ = r² sinθ e_r - r r_θ sinθ e_θ - r r_φ e_φ
            let mut n_vec = [0.0; 3];
            for c in 0..3 {
                n_vec[c] = r * r * st * e_r[c] - r * rt * st * e_t[c] - r * rp * e_p[c];
            }
            let jac = geom::norm(&n_vec);
            nodes.push(geom::scale(&e_r, r));
            normals.push(geom::scale(&n_vec, 1.0 / jac));
            weights.push(wi * dphi * jac / st);
            params.push((theta, phi));
        }
    }
    Ok(SurfaceGrid {
        descriptor: SurfaceDescriptor {
            shape,
            n_theta,
            n_phi,
        },
        nodes,
        weights,
        normals,
        params,
    })
}

/// Default angular resolution for wavenumber `k` on a body of size `R`:
/// `n_theta = max(20, ⌈2kR⌉ + 10)`, `n_phi = 2 n_theta`.
pub fn default_surface_resolution(k: f64, radius: f64) -> (usize, usize) {
    let n_theta = 20usize.max((2.0 * k * radius).ceil() as usize + 10);
    (n_theta, 2 * n_theta)
}

/// Default direction-grid resolution: `n_theta = max(10, ⌈kR⌉ + 6)`,
/// `n_phi = 2 n_theta`, enough to carry every harmonic degree that has a
/// Dirichlet zero below `kR` plus a margin.
pub fn default_direction_resolution(k: f64, radius: f64) -> (usize, usize) {
    let n_theta = 10usize.max((k * radius).ceil() as usize + 6);
    (n_theta, 2 * n_theta)
}

/// Quadrature on the unit sphere of directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub directions: Vec<Point3>,
    pub weights: Vec<f64>,
}

impl DirectionGrid {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Largest polynomial degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        (2 * self.n_theta - 1).min(self.n_phi - 1)
    }

    /// Quadrature sum `Σ w_j f_j`.
    pub fn integrate(&self, values: &[Complex64]) -> Result<Complex64> {
        check_len(self.len(), values.len())?;
        Ok(self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| v * *w)
            .sum())
    }
}

pub fn make_direction_grid(n_theta: usize, n_phi: usize) -> Result<DirectionGrid> {
    check_sizes(n_theta, n_phi)?;
    let sphere = make_sphere(1.0, n_theta, n_phi)?;
    Ok(DirectionGrid {
        n_theta,
        n_phi,
        directions: sphere.normals,
        weights: sphere.weights,
    })
}

/// `Σ_m σ_m · values_m`.
pub fn integrate_surface(grid: &SurfaceGrid, values: &[Complex64]) -> Result<Complex64> {
    check_len(grid.len(), values.len())?;
    Ok(grid
        .weights
        .iter()
        .zip(values)
        .map(|(w, v)| v * *w)
        .sum())
}

/// Interior collocation points with a uniform row weight `sqrt(V / P)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorPoints {
    pub points: Vec<Point3>,
    pub weight: f64,
    pub seed: u64,
    pub radius_fraction: f64,
}

impl InteriorPoints {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Apply a rotation to every point.
    pub fn rotated(&self, m: &[[f64; 3]; 3]) -> Self {
        Self {
            points: self.points.iter().map(|p| geom::rotate(m, p)).collect(),
            ..self.clone()
        }
    }
}

/// Largest radius fraction at which interior points are placed.
pub const INTERIOR_RADIUS_FRACTION: f64 = 0.95;

/// Interior point count used when none is given: `max(2 · directions, 500)`.
pub fn default_interior_count(n_directions: usize) -> usize {
    (2 * n_directions).max(500)
}

/// Seeded pseudo-random points `t · r(x̂) x̂` with uniform direction and
/// `t = 0.95 U^{1/3}` (volume-uniform on the ball).
pub fn sample_interior(grid: &SurfaceGrid, count: usize, seed: u64) -> Result<InteriorPoints> {
    if count == 0 {
        return Err(Error::InvalidArgument("interior point count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = grid.shape();
    let points = (0..count)
        .map(|_| {
            let cos_t: f64 = rng.random_range(-1.0..1.0);
            let phi: f64 = rng.random_range(0.0..TAU);
            let u: f64 = rng.random::<f64>();
            let theta = cos_t.acos();
            let t = INTERIOR_RADIUS_FRACTION * u.cbrt();
            geom::scale(&geom::unit_from_angles(theta, phi), t * shape.radius(theta, phi))
        })
        .collect();
    let volume = grid.volume() * INTERIOR_RADIUS_FRACTION.powi(3);
    Ok(InteriorPoints {
        points,
        weight: (volume / count as f64).sqrt(),
        seed,
        radius_fraction: INTERIOR_RADIUS_FRACTION,
    })
}

/// Deterministic near-uniform directions (Fibonacci spiral).
pub fn fibonacci_directions(n: usize) -> Vec<Point3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}
