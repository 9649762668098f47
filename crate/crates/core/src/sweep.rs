//! Completeness indicator as a function of `k`, uniform sweeps, and dip
//! detection/refinement.
//!
//! The indicator is the smallest sine of the principal angles between the
//! span of plane waves (sampled on the surface and at interior points) and
//! functions that vanish on the surface. It drops toward zero exactly where
//! some Herglotz wave is `O(1)` inside the domain but vanishes on the
//! boundary, i.e. at interior Dirichlet eigenvalues.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_wavenumber, Error, Result};
use crate::herglotz::assemble_trace_matrix;
use crate::linalg;
use crate::surface::{DirectionGrid, InteriorPoints, SurfaceDescriptor, SurfaceGrid};

/// Which function of `k` a sweep sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndicatorKind {
    /// Subspace-angle indicator, valued in `[0, 1]`.
    Subspace,
    /// Smallest singular value of the single-layer matrix.
    SingleLayer,
    /// Anything else (user supplied).
    Custom,
}

/// A scalar function of `k` whose small values mark eigenvalues.
pub trait Indicator: Sync {
    fn value(&self, k: f64) -> Result<f64>;
    /// Number of near-zero singular values at `k`.
    fn multiplicity(&self, k: f64, gap_ratio: f64) -> Result<usize>;
    fn kind(&self) -> IndicatorKind {
        IndicatorKind::Custom
    }
}

/// Relative truncation of the stacked plane-wave matrix before
/// orthonormalization. Directions kept closer to the cutoff are resolved
/// only to about `ε / rtol`, which limits reproducibility under rotations
/// of the whole configuration.
pub const DEFAULT_RANK_RTOL: f64 = 1e-8;

/// Number of entries of `s` below `median(s) / gap_ratio`.
pub fn count_below_median(s: &[f64], gap_ratio: f64) -> usize {
    if s.is_empty() {
        return 0;
    }
    let med = median(s);
    s.iter().filter(|&&v| v < med / gap_ratio).count()
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn check_interior(grid: &SurfaceGrid, interior: &InteriorPoints) -> Result<()> {
    if interior.is_empty() {
        return Err(Error::IllPosedIndicator("no interior points".into()));
    }
    if let Some(p) = interior.points.iter().find(|p| grid.radial_fraction(p) >= 1.0) {
        return Err(Error::Domain(format!("interior point {p:?} is not inside the surface")));
    }
    Ok(())
}

/// Singular values of the boundary-row block of an orthonormal basis of
/// the stacked `[boundary; interior]` plane-wave matrix, ascending.
///
/// Errors with `IllPosedIndicator` when there are fewer interior points
/// than the numerical rank of the stacked matrix.
pub fn boundary_block_singular_values(
    k: f64,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    interior: &InteriorPoints,
    rtol: f64,
) -> Result<Vec<f64>> {
    check_wavenumber(k)?;
    check_interior(grid, interior)?;
    let a = assemble_trace_matrix(k, grid, dirs, Some(interior))?;
    let int = a.interior.as_ref().expect("interior block requested");
    let split = linalg::subspace_split(a.boundary.as_ref(), int.as_ref(), rtol)?;
    if interior.len() < split.rank {
        return Err(Error::IllPosedIndicator(format!(
            "{} interior points cannot resolve a rank-{} plane-wave span",
            interior.len(),
            split.rank
        )));
    }
    Ok(split
        .top_singular_values
        .into_iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect())
}

/// Smallest boundary-block singular value, in `[0, 1]`.
pub fn completeness_indicator(
    k: f64,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    interior: &InteriorPoints,
) -> Result<f64> {
    let s = boundary_block_singular_values(k, grid, dirs, interior, DEFAULT_RANK_RTOL)?;
    Ok(s.first().copied().unwrap_or(0.0))
}

/// Count of boundary-block singular values below `median / gap_ratio`.
pub fn estimate_multiplicity(
    k_star: f64,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    interior: &InteriorPoints,
    gap_ratio: f64,
) -> Result<usize> {
    let s = boundary_block_singular_values(k_star, grid, dirs, interior, DEFAULT_RANK_RTOL)?;
    Ok(count_below_median(&s, gap_ratio))
}

/// The subspace-angle indicator bound to one surface discretization.
#[derive(Debug, Clone, Copy)]
pub struct SubspaceIndicator<'a> {
    pub grid: &'a SurfaceGrid,
    pub dirs: &'a DirectionGrid,
    pub interior: &'a InteriorPoints,
    pub rtol: f64,
}

impl<'a> SubspaceIndicator<'a> {
    pub fn new(grid: &'a SurfaceGrid, dirs: &'a DirectionGrid, interior: &'a InteriorPoints) -> Self {
        Self {
            grid,
            dirs,
            interior,
            rtol: DEFAULT_RANK_RTOL,
        }
    }
}

impl Indicator for SubspaceIndicator<'_> {
    fn value(&self, k: f64) -> Result<f64> {
        let s = boundary_block_singular_values(k, self.grid, self.dirs, self.interior, self.rtol)?;
        Ok(s.first().copied().unwrap_or(0.0))
    }

    fn multiplicity(&self, k: f64, gap_ratio: f64) -> Result<usize> {
        let s = boundary_block_singular_values(k, self.grid, self.dirs, self.interior, self.rtol)?;
        Ok(count_below_median(&s, gap_ratio))
    }

    fn kind(&self) -> IndicatorKind {
        IndicatorKind::Subspace
    }
}

/// Dip thresholds and execution settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepOptions {
    /// Samples at or below `depth_ratio · median` are dip candidates.
    pub depth_ratio: f64,
    /// Multiplicity counts singular values below `median / gap_ratio`.
    pub gap_ratio: f64,
    /// Final bracket width of golden-section refinement.
    pub refine_tol: f64,
    /// Refine dips and estimate multiplicities after sampling.
    pub resolve: bool,
    /// Worker threads for sampling; results do not depend on it, so it is
    /// left out of serialized artifacts.
    #[serde(skip, default = "one_thread")]
    pub threads: usize,
}

fn one_thread() -> usize {
    1
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            depth_ratio: 0.1,
            gap_ratio: 10.0,
            refine_tol: 1e-4,
            resolve: true,
            threads: 1,
        }
    }
}

/// Everything needed to reproduce a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub indicator: IndicatorKind,
    pub surface: Option<SurfaceDescriptor>,
    pub directions: Option<[usize; 2]>,
    pub interior_seed: Option<u64>,
    pub interior_count: Option<usize>,
    pub interior_radius_fraction: Option<f64>,
    pub rank_rtol: Option<f64>,
    /// Harmonic degree limit of a compressed single-layer operator.
    pub band_limit: Option<usize>,
    pub options: SweepOptions,
}

impl SweepConfig {
    pub fn for_grid(
        grid: &SurfaceGrid,
        dirs: Option<&DirectionGrid>,
        interior: Option<&InteriorPoints>,
    ) -> Self {
        Self {
            indicator: IndicatorKind::Custom,
            surface: Some(grid.descriptor.clone()),
            directions: dirs.map(|d| [d.n_theta, d.n_phi]),
            interior_seed: interior.map(|i| i.seed),
            interior_count: interior.map(|i| i.len()),
            interior_radius_fraction: interior.map(|i| i.radius_fraction),
            rank_rtol: None,
            band_limit: None,
            options: SweepOptions::default(),
        }
    }

    /// A config that records nothing but the indicator kind.
    pub fn bare(indicator: IndicatorKind) -> Self {
        Self {
            indicator,
            surface: None,
            directions: None,
            interior_seed: None,
            interior_count: None,
            interior_radius_fraction: None,
            rank_rtol: None,
            band_limit: None,
            options: SweepOptions::default(),
        }
    }
}

/// A resolved dip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub k_refined: f64,
    pub indicator_min: f64,
    pub multiplicity: usize,
}

/// A flagged sample before refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipCandidate {
    pub index: usize,
    pub k: f64,
    pub indicator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub k_samples: Vec<f64>,
    pub indicator: Vec<f64>,
    pub dips: Vec<Dip>,
    pub config: SweepConfig,
}

impl SweepResult {
    /// `k,indicator` rows with round-trip precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,indicator")?;
        for (k, v) in self.k_samples.iter().zip(&self.indicator) {
            writeln!(out, "{k:.16e},{v:.16e}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s)?;
        r.validate()?;
        Ok(r)
    }

    /// Check the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("sweep result: {m}")));
        if self.k_samples.len() != self.indicator.len() {
            return bad("sample and indicator lengths differ");
        }
        if self.k_samples.iter().any(|k| !(*k > 0.0)) {
            return bad("nonpositive k sample");
        }
        if self.k_samples.windows(2).any(|w| w[1] <= w[0]) {
            return bad("k samples not strictly ascending");
        }
        if self.indicator.iter().any(|v| !(*v >= 0.0)) {
            return bad("negative or NaN indicator");
        }
        if self.config.indicator == IndicatorKind::Subspace && self.indicator.iter().any(|v| *v > 1.0) {
            return bad("subspace indicator above 1");
        }
        if let (Some(lo), Some(hi)) = (self.k_samples.first(), self.k_samples.last()) {
            if self.dips.iter().any(|d| d.k_refined < *lo || d.k_refined > *hi) {
                return bad("dip outside the sweep range");
            }
        }
        Ok(())
    }
}

/// `n` uniformly spaced samples covering `[k_lo, k_hi]`.
pub fn uniform_k_grid(k_lo: f64, k_hi: f64, n: usize) -> Result<Vec<f64>> {
    check_wavenumber(k_lo)?;
    check_wavenumber(k_hi)?;
    if k_lo >= k_hi {
        return Err(Error::InvalidArgument(format!("empty k range [{k_lo}, {k_hi}]")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n}")));
    }
    let h = (k_hi - k_lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { k_hi } else { k_lo + h * i as f64 })
        .collect())
}

fn sample(ind: &dyn Indicator, ks: &[f64], threads: usize) -> Result<Vec<f64>> {
    if threads <= 1 {
        return ks.iter().map(|&k| ind.value(k)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| ks.par_iter().map(|&k| ind.value(k)).collect())
}

/// Sample `ind` on a uniform grid and, if `options.resolve`, refine and
/// classify the dips.
pub fn run_sweep(
    ind: &dyn Indicator,
    k_lo: f64,
    k_hi: f64,
    n_samples: usize,
    options: &SweepOptions,
    mut config: SweepConfig,
) -> Result<SweepResult> {
    let ks = uniform_k_grid(k_lo, k_hi, n_samples)?;
    let values = sample(ind, &ks, options.threads)?;
    config.indicator = ind.kind();
    config.options = options.clone();
    let mut result = SweepResult {
        k_samples: ks,
        indicator: values,
        dips: Vec::new(),
        config,
    };
    if options.resolve {
        result.dips = resolve_dips(ind, &result, options)?;
    }
    Ok(result)
}

/// Subspace-indicator sweep over `[k_lo, k_hi]`.
pub fn sweep_k(
    k_lo: f64,
    k_hi: f64,
    n_samples: usize,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    interior: &InteriorPoints,
    options: &SweepOptions,
) -> Result<SweepResult> {
    let ind = SubspaceIndicator::new(grid, dirs, interior);
    let mut config = SweepConfig::for_grid(grid, Some(dirs), Some(interior));
    config.rank_rtol = Some(ind.rtol);
    run_sweep(&ind, k_lo, k_hi, n_samples, options, config)
}

/// Flag samples at or below `depth_ratio · median`; each contiguous run of
/// flagged samples yields its smallest sample, kept only if that sample is
/// a strict interior local minimum of the array.
pub fn detect_dips(k: &[f64], values: &[f64], depth_ratio: f64) -> Vec<DipCandidate> {
    let n = values.len();
    if n < 3 || k.len() != n {
        return Vec::new();
    }
    let thresh = depth_ratio * median(values);
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if values[i] > thresh {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && values[i] <= thresh {
            i += 1;
        }
        let best = (start..i)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("nonempty run");
        if best >= 1 && best <= n - 2 && values[best - 1] >= values[best] && values[best + 1] >= values[best] {
            out.push(DipCandidate {
                index: best,
                k: k[best],
                indicator: values[best],
            });
        }
    }
    out
}

/// Golden-section minimization of `f` on `[a, b]` down to width `tol`.
///
/// Fails with `Bracket` when the minimizer ends within `tol` of an end,
/// i.e. when the bracket holds no interior minimum.
pub fn golden_section(
    f: impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(a < b) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bad bracket [{a}, {b}] or tol {tol}")));
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (x, fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if x - a <= tol || b - x <= tol {
        return Err(Error::Bracket(format!("no interior minimum in [{a}, {b}]")));
    }
    Ok((x, fx))
}

/// Refine a dip of the subspace indicator inside
/// `[k_center − half_width, k_center + half_width]`.
pub fn refine_dip(
    k_center: f64,
    half_width: f64,
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    interior: &InteriorPoints,
    tol: f64,
) -> Result<(f64, f64)> {
    refine_with(&SubspaceIndicator::new(grid, dirs, interior), k_center, half_width, tol)
}

/// [`refine_dip`] for any indicator.
pub fn refine_with(ind: &dyn Indicator, k_center: f64, half_width: f64, tol: f64) -> Result<(f64, f64)> {
    if !(half_width > 0.0) {
        return Err(Error::InvalidArgument(format!("half width must be positive, got {half_width}")));
    }
    let lo = k_center - half_width;
    if !(lo > 0.0) {
        return Err(Error::InvalidWavenumber(lo));
    }
    golden_section(|k| ind.value(k), lo, k_center + half_width, tol)
}

/// Refine every detected dip between its neighboring samples and estimate
/// its multiplicity.
pub fn resolve_dips(ind: &dyn Indicator, result: &SweepResult, options: &SweepOptions) -> Result<Vec<Dip>> {
    let ks = &result.k_samples;
    detect_dips(ks, &result.indicator, options.depth_ratio)
        .into_iter()
        .map(|c| {
            let (k, v) = golden_section(|k| ind.value(k), ks[c.index - 1], ks[c.index + 1], options.refine_tol)?;
            Ok(Dip {
                k_refined: k,
                indicator_min: v,
                multiplicity: ind.multiplicity(k, options.gap_ratio)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic(f64);
    impl Indicator for Quadratic {
        fn value(&self, k: f64) -> Result<f64> {
            Ok((k - self.0).powi(2) + 0.01)
        }
        fn multiplicity(&self, _k: f64, _g: f64) -> Result<usize> {
            Ok(1)
        }
    }

    #[test]
    fn golden_section_on_quadratic() {
        let q = Quadratic(2.345);
        let (k, v) = refine_with(&q, 2.3, 0.2, 1e-6).unwrap();
        assert!((k - 2.345).abs() <= 1e-6);
        assert!((v - 0.01).abs() < 1e-11);
        assert!(matches!(refine_with(&q, 2.0, 0.1, 1e-6), Err(Error::Bracket(_))));
        assert!(refine_with(&q, 2.0, 0.0, 1e-6).is_err());
    }

    #[test]
    fn detect_dips_examples() {
        let k: Vec<f64> = (0..50).map(|i| 1.0 + 0.1 * i as f64).collect();
        assert!(detect_dips(&k, &[0.5; 50], 0.1).is_empty());
        let mut v = vec![0.5; 50];
        v[10] = 0.01;
        v[11] = 0.02;
        v[30] = 0.03;
        v[49] = 0.001;
        let d = detect_dips(&k, &v, 0.1);
        assert_eq!(d.iter().map(|c| c.index).collect::<Vec<_>>(), [10, 30]);
        assert!(detect_dips(&k, &v, 0.0).is_empty());
    }

    #[test]
    fn uniform_grid_guards() {
        assert!(uniform_k_grid(2.0, 2.0, 10).is_err());
        assert!(uniform_k_grid(3.0, 2.0, 10).is_err());
        assert!(uniform_k_grid(1.0, 2.0, 1).is_err());
        let g = uniform_k_grid(3.0, 6.5, 350).unwrap();
        assert_eq!(g.len(), 350);
        assert_eq!(*g.last().unwrap(), 6.5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sweep_of_stub_indicator() {
        let q = Quadratic(2.345);
        let opts = SweepOptions::default();
        let r = run_sweep(&q, 1.0, 4.0, 61, &opts, SweepConfig::bare(IndicatorKind::Custom)).unwrap();
        assert_eq!(r.dips.len(), 1);
        assert!((r.dips[0].k_refined - 2.345).abs() < 1e-4);
        r.validate().unwrap();
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().next(), Some("k,indicator"));
        assert_eq!(text.lines().count(), 62);
        let back = SweepResult::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let par = run_sweep(&q, 1.0, 4.0, 61, &SweepOptions { threads: 3, ..opts }, SweepConfig::bare(IndicatorKind::Custom)).unwrap();
        assert_eq!(par.indicator, r.indicator);
    }

    use crate::geom;
    use crate::surface::{
        default_direction_resolution, default_interior_count, default_surface_resolution,
        make_direction_grid, make_sphere, sample_interior,
    };
    use std::f64::consts::PI;

    struct Setup {
        grid: SurfaceGrid,
        dirs: DirectionGrid,
        interior: InteriorPoints,
    }

    fn ball(radius: f64, k_max: f64) -> Setup {
        let (nt, np) = default_surface_resolution(k_max, radius);
        let (dt, dp) = default_direction_resolution(k_max, radius);
        let grid = make_sphere(radius, nt, np).unwrap();
        let dirs = make_direction_grid(dt, dp).unwrap();
        let interior = sample_interior(&grid, default_interior_count(dirs.len()), 11).unwrap();
        Setup { grid, dirs, interior }
    }

    #[test]
    fn indicator_on_ball_examples() {
        let grid = make_sphere(1.0, 30, 60).unwrap();
        let dirs = make_direction_grid(24, 48).unwrap();
        let interior = sample_interior(&grid, 600, 5).unwrap();
        let at_pi = completeness_indicator(PI, &grid, &dirs, &interior).unwrap();
        assert!(at_pi <= 0.02, "{at_pi}");
        let b = ball(1.0, 2.0);
        let at_2 = completeness_indicator(2.0, &b.grid, &b.dirs, &b.interior).unwrap();
        assert!(at_2 >= 0.2, "{at_2}");
    }

    #[test]
    fn indicator_scales_with_kr() {
        let b1 = ball(1.0, 3.5);
        let b2 = ball(2.0, 1.75);
        let e1 = completeness_indicator(PI, &b1.grid, &b1.dirs, &b1.interior).unwrap();
        let e2 = completeness_indicator(PI / 2.0, &b2.grid, &b2.dirs, &b2.interior).unwrap();
        assert!(e1 <= 0.02 && e2 <= 0.02, "{e1} {e2}");
        // away from the spectrum the values are O(1) and comparable
        let o1 = completeness_indicator(2.5, &b1.grid, &b1.dirs, &b1.interior).unwrap();
        let o2 = completeness_indicator(1.25, &b2.grid, &b2.dirs, &b2.interior).unwrap();
        assert!(o1 / o2 <= 2.0 && o2 / o1 <= 2.0, "{o1} {o2}");
    }

    #[test]
    fn indicator_errors() {
        let b = ball(1.0, 2.0);
        let mut outside = b.interior.clone();
        outside.points[3] = [0.0, 0.0, 1.01];
        assert!(matches!(
            completeness_indicator(2.0, &b.grid, &b.dirs, &outside),
            Err(Error::Domain(_))
        ));
        let few = sample_interior(&b.grid, 20, 1).unwrap();
        assert!(matches!(
            completeness_indicator(2.0, &b.grid, &b.dirs, &few),
            Err(Error::IllPosedIndicator(_))
        ));
        assert!(completeness_indicator(0.0, &b.grid, &b.dirs, &b.interior).is_err());
    }

    #[test]
    fn indicator_rotation_invariant() {
        let b = ball(1.0, 3.0);
        let rot = geom::rotation_matrix(&[0.3, -0.5, 0.8], 1.1);
        let mut grid = b.grid.clone();
        grid.nodes = grid.nodes.iter().map(|p| geom::rotate(&rot, p)).collect();
        grid.normals = grid.normals.iter().map(|p| geom::rotate(&rot, p)).collect();
        let mut dirs = b.dirs.clone();
        dirs.directions = dirs.directions.iter().map(|p| geom::rotate(&rot, p)).collect();
        let interior = b.interior.rotated(&rot);
        for k in [2.5, PI] {
            let a = completeness_indicator(k, &b.grid, &b.dirs, &b.interior).unwrap();
            let r = completeness_indicator(k, &grid, &dirs, &interior).unwrap();
            assert!((a - r).abs() <= 1e-10, "{a} vs {r}");
        }
    }

    #[test]
    fn multiplicities_and_refinement_on_ball() {
        let b = ball(1.0, 6.5);
        let expect = [(PI, 1), (4.493409457909064, 3), (5.76345919689455, 5)];
        for (k, m) in expect {
            assert_eq!(estimate_multiplicity(k, &b.grid, &b.dirs, &b.interior, 10.0).unwrap(), m, "k = {k}");
        }
        let (k, v) = refine_dip(3.145, 0.02, &b.grid, &b.dirs, &b.interior, 1e-4).unwrap();
        assert!((k - PI).abs() <= 1e-3, "{k}");
        assert!(v < 0.01);
        let (k, _) = refine_dip(4.49, 0.02, &b.grid, &b.dirs, &b.interior, 1e-4).unwrap();
        assert!((k - 4.493409457909064).abs() <= 1e-3, "{k}");
    }

    #[test]
    fn sweep_is_deterministic() {
        let b = ball(1.0, 3.3);
        let opts = SweepOptions::default();
        let a = sweep_k(3.0, 3.3, 7, &b.grid, &b.dirs, &b.interior, &opts).unwrap();
        let c = sweep_k(3.0, 3.3, 7, &b.grid, &b.dirs, &b.interior, &opts).unwrap();
        assert_eq!(a.to_json().unwrap(), c.to_json().unwrap());
        assert_eq!(a.dips.len(), 1);
        assert_eq!(a.dips[0].multiplicity, 1);
        assert_eq!(a.config.interior_seed, Some(11));
        a.validate().unwrap();
        assert!(sweep_k(3.3, 3.0, 7, &b.grid, &b.dirs, &b.interior, &opts).is_err());
    }
}
