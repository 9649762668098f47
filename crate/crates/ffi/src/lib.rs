//! C ABI for `pwcomplete`.
//!
//! Every fallible function returns a [`PwcStatus`]; on failure a message is
//! kept per thread and can be read with [`pwc_last_error_message`]. Objects
//! are opaque handles created by `*_new` functions and released by the
//! matching `*_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pwcomplete::specfun::{sph_bessel_j, HarmonicIndex};
use pwcomplete::spectra::{ball_dirichlet_eigs, single_layer_eig_sweep};
use pwcomplete::surface::{
    default_interior_count, make_direction_grid, make_sphere, make_star_surface, sample_interior,
    DirectionGrid, PerturbationTerm, SurfaceGrid,
};
use pwcomplete::sweep::{completeness_indicator, sweep_k, SweepOptions, SweepResult};
use pwcomplete::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PwcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidWavenumber = 3,
    SizeMismatch = 4,
    DegenerateSurface = 5,
    UnsupportedSurface = 6,
    Domain = 7,
    IllPosed = 8,
    Bracket = 9,
    Inconclusive = 10,
    Numerical = 11,
    Io = 12,
    Json = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

/// Surface quadrature grid.
pub struct PwcSurface(SurfaceGrid);

/// Quadrature grid on the sphere of directions.
pub struct PwcDirections(DirectionGrid);

/// Sampled indicator and resolved dips of a sweep.
pub struct PwcSweep(SweepResult);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> PwcStatus {
    match e {
        Error::InvalidArgument(_) | Error::InvalidDirection(_) => PwcStatus::InvalidArgument,
        Error::InvalidWavenumber(_) => PwcStatus::InvalidWavenumber,
        Error::SizeMismatch { .. } => PwcStatus::SizeMismatch,
        Error::DegenerateSurface(_) => PwcStatus::DegenerateSurface,
        Error::UnsupportedSurface(_) => PwcStatus::UnsupportedSurface,
        Error::Domain(_) => PwcStatus::Domain,
        Error::IllPosedIndicator(_) => PwcStatus::IllPosed,
        Error::Bracket(_) => PwcStatus::Bracket,
        Error::Inconclusive(_) => PwcStatus::Inconclusive,
        Error::Numerical(_) => PwcStatus::Numerical,
        Error::Io(_) => PwcStatus::Io,
        Error::Json(_) => PwcStatus::Json,
    }
}

struct Fail(PwcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PwcStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PwcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PwcStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            PwcStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

fn too_small(needed: usize, capacity: usize) -> Result<(), Fail> {
    if capacity < needed {
        return Err(Fail(
            PwcStatus::BufferTooSmall,
            format!("buffer holds {capacity}, need {needed}"),
        ));
    }
    Ok(())
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `capacity`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pwc_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && capacity > 0 {
            let n = msg.len().min(capacity - 1);
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pwc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Spherical Bessel function `j_l(x)`.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pwc_sph_bessel_j(l: usize, x: f64, result: *mut f64) -> PwcStatus {
    guard(|| {
        *unsafe { out(result, "result") }? = sph_bessel_j(l, x)?;
        Ok(())
    })
}

/// Sphere of radius `radius` with an `n_theta × n_phi` product grid.
///
/// # Safety
/// `surface` must be a valid pointer; on success it receives a handle owned
/// by the caller.
#[no_mangle]
pub unsafe extern "C" fn pwc_sphere_new(
    radius: f64,
    n_theta: usize,
    n_phi: usize,
    surface: *mut *mut PwcSurface,
) -> PwcStatus {
    guard(|| {
        let slot = unsafe { out(surface, "surface") }?;
        *slot = Box::into_raw(Box::new(PwcSurface(make_sphere(radius, n_theta, n_phi)?)));
        Ok(())
    })
}

/// Star surface `r = R0 (1 + Σ eps_i Re Y_{l_i m_i})` with `n_terms` terms.
///
/// # Safety
/// `l`, `m` and `eps` must each point to `n_terms` values (or be null when
/// `n_terms` is 0); `surface` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pwc_star_new(
    base_radius: f64,
    l: *const usize,
    m: *const i64,
    eps: *const f64,
    n_terms: usize,
    n_theta: usize,
    n_phi: usize,
    surface: *mut *mut PwcSurface,
) -> PwcStatus {
    guard(|| {
        let slot = unsafe { out(surface, "surface") }?;
        let (l, m, eps) = unsafe {
            (slice(l, n_terms, "l")?, slice(m, n_terms, "m")?, slice(eps, n_terms, "eps")?)
        };
        let terms = (0..n_terms)
            .map(|i| {
                Ok(PerturbationTerm {
                    index: HarmonicIndex::new(l[i], m[i])?,
                    coefficient: eps[i],
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let grid = make_star_surface(base_radius, &terms, n_theta, n_phi)?;
        *slot = Box::into_raw(Box::new(PwcSurface(grid)));
        Ok(())
    })
}

/// # Safety
/// `surface` must be null or a handle from a `*_new` call, freed once.
#[no_mangle]
pub unsafe extern "C" fn pwc_surface_free(surface: *mut PwcSurface) {
    if !surface.is_null() {
        drop(unsafe { Box::from_raw(surface) });
    }
}

/// Number of quadrature nodes, or 0 for a null handle.
///
/// # Safety
/// `surface` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pwc_surface_len(surface: *const PwcSurface) -> usize {
    unsafe { surface.as_ref() }.map_or(0, |s| s.0.len())
}

/// Copy node coordinates (`3 · len` values, xyz interleaved) and area
/// weights (`len` values). Either output may be null.
///
/// # Safety
/// `surface` must be a live handle; non-null outputs must hold `capacity`
/// nodes' worth of values.
#[no_mangle]
pub unsafe extern "C" fn pwc_surface_nodes(
    surface: *const PwcSurface,
    xyz: *mut f64,
    weights: *mut f64,
    capacity: usize,
) -> PwcStatus {
    guard(|| {
        let g = &unsafe { handle(surface, "surface") }?.0;
        too_small(g.len(), capacity)?;
        if !xyz.is_null() {
            let dst = unsafe { slice_mut(xyz, 3 * g.len(), "xyz") }?;
            for (d, p) in dst.chunks_exact_mut(3).zip(&g.nodes) {
                d.copy_from_slice(p);
            }
        }
        if !weights.is_null() {
            unsafe { slice_mut(weights, g.len(), "weights") }?.copy_from_slice(&g.weights);
        }
        Ok(())
    })
}

/// Gauss–Legendre × trapezoid grid of directions.
///
/// # Safety
/// `dirs` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pwc_directions_new(
    n_theta: usize,
    n_phi: usize,
    dirs: *mut *mut PwcDirections,
) -> PwcStatus {
    guard(|| {
        let slot = unsafe { out(dirs, "dirs") }?;
        *slot = Box::into_raw(Box::new(PwcDirections(make_direction_grid(n_theta, n_phi)?)));
        Ok(())
    })
}

/// # Safety
/// `dirs` must be null or a handle from [`pwc_directions_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn pwc_directions_free(dirs: *mut PwcDirections) {
    if !dirs.is_null() {
        drop(unsafe { Box::from_raw(dirs) });
    }
}

/// # Safety
/// `dirs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pwc_directions_len(dirs: *const PwcDirections) -> usize {
    unsafe { dirs.as_ref() }.map_or(0, |d| d.0.len())
}

/// Dirichlet eigenvalues `k ≤ k_max` of the ball, ascending, with their
/// multiplicities. `count` receives the total even when `capacity` is too
/// small (status `BufferTooSmall`).
///
/// # Safety
/// `ks` and `multiplicities` must hold `capacity` values; `count` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn pwc_ball_eigs(
    radius: f64,
    k_max: f64,
    ks: *mut f64,
    multiplicities: *mut usize,
    capacity: usize,
    count: *mut usize,
) -> PwcStatus {
    guard(|| {
        let count = unsafe { out(count, "count") }?;
        let recs = ball_dirichlet_eigs(radius, k_max)?;
        *count = recs.len();
        too_small(recs.len(), capacity)?;
        let ks = unsafe { slice_mut(ks, recs.len(), "ks") }?;
        let mults = unsafe { slice_mut(multiplicities, recs.len(), "multiplicities") }?;
        for (i, r) in recs.iter().enumerate() {
            ks[i] = r.k;
            mults[i] = r.multiplicity;
        }
        Ok(())
    })
}

fn interior_for(
    grid: &SurfaceGrid,
    dirs: &DirectionGrid,
    count: usize,
    seed: u64,
) -> Result<pwcomplete::surface::InteriorPoints, Error> {
    let count = if count == 0 { default_interior_count(dirs.len()) } else { count };
    sample_interior(grid, count, seed)
}

/// Subspace completeness indicator at `k`, in `[0, 1]`. An
/// `interior_count` of 0 selects the default count.
///
/// # Safety
/// Handles must be live; `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pwc_completeness_indicator(
    k: f64,
    surface: *const PwcSurface,
    dirs: *const PwcDirections,
    interior_count: usize,
    seed: u64,
    result: *mut f64,
) -> PwcStatus {
    guard(|| {
        let (g, d) = unsafe { (&handle(surface, "surface")?.0, &handle(dirs, "dirs")?.0) };
        let result = unsafe { out(result, "result") }?;
        let interior = interior_for(g, d, interior_count, seed)?;
        *result = completeness_indicator(k, g, d, &interior)?;
        Ok(())
    })
}

/// Relative residual and density norm of fitting `Y_lm` by plane-wave
/// traces at `k`. A NaN `ridge` selects the default.
///
/// # Safety
/// Handles must be live; outputs must be valid (either may be null).
#[no_mangle]
pub unsafe extern "C" fn pwc_fit_harmonic(
    k: f64,
    surface: *const PwcSurface,
    dirs: *const PwcDirections,
    l: usize,
    m: i64,
    ridge: f64,
    residual: *mut f64,
    density_norm: *mut f64,
) -> PwcStatus {
    guard(|| {
        let (g, d) = unsafe { (&handle(surface, "surface")?.0, &handle(dirs, "dirs")?.0) };
        let target = pwcomplete::herglotz::harmonic_on_grid(g, HarmonicIndex::new(l, m)?);
        let ridge = if ridge.is_nan() { None } else { Some(ridge) };
        let fit = pwcomplete::herglotz::fit_trace(k, &target, g, d, ridge)?;
        if let Some(r) = unsafe { residual.as_mut() } {
            *r = fit.residual;
        }
        if let Some(n) = unsafe { density_norm.as_mut() } {
            *n = fit.density_norm;
        }
        Ok(())
    })
}

/// Subspace-indicator sweep of `n_samples` points over `[k_lo, k_hi]` with
/// dip refinement. `threads` of 0 means 1.
///
/// # Safety
/// Handles must be live; `sweep` must be valid and receives an owned handle.
#[no_mangle]
pub unsafe extern "C" fn pwc_sweep_new(
    surface: *const PwcSurface,
    dirs: *const PwcDirections,
    k_lo: f64,
    k_hi: f64,
    n_samples: usize,
    interior_count: usize,
    seed: u64,
    threads: usize,
    sweep: *mut *mut PwcSweep,
) -> PwcStatus {
    guard(|| {
        let (g, d) = unsafe { (&handle(surface, "surface")?.0, &handle(dirs, "dirs")?.0) };
        let slot = unsafe { out(sweep, "sweep") }?;
        let interior = interior_for(g, d, interior_count, seed)?;
        let opts = SweepOptions { threads: threads.max(1), ..SweepOptions::default() };
        let res = sweep_k(k_lo, k_hi, n_samples, g, d, &interior, &opts)?;
        *slot = Box::into_raw(Box::new(PwcSweep(res)));
        Ok(())
    })
}

/// Sweep of the single-layer operator's smallest singular value.
///
/// # Safety
/// `surface` must be live; `sweep` must be valid and receives an owned
/// handle.
#[no_mangle]
pub unsafe extern "C" fn pwc_single_layer_sweep_new(
    surface: *const PwcSurface,
    k_lo: f64,
    k_hi: f64,
    n_samples: usize,
    threads: usize,
    sweep: *mut *mut PwcSweep,
) -> PwcStatus {
    guard(|| {
        let g = &unsafe { handle(surface, "surface") }?.0;
        let slot = unsafe { out(sweep, "sweep") }?;
        let opts = SweepOptions { threads: threads.max(1), ..SweepOptions::default() };
        let res = single_layer_eig_sweep(k_lo, k_hi, n_samples, g, &opts)?;
        *slot = Box::into_raw(Box::new(PwcSweep(res)));
        Ok(())
    })
}

/// # Safety
/// `sweep` must be null or a handle from a sweep constructor, freed once.
#[no_mangle]
pub unsafe extern "C" fn pwc_sweep_free(sweep: *mut PwcSweep) {
    if !sweep.is_null() {
        drop(unsafe { Box::from_raw(sweep) });
    }
}

/// Number of resolved dips, or 0 for a null handle.
///
/// # Safety
/// `sweep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pwc_sweep_dip_count(sweep: *const PwcSweep) -> usize {
    unsafe { sweep.as_ref() }.map_or(0, |s| s.0.dips.len())
}

/// Refined location, indicator minimum and multiplicity of dip `index`.
///
/// # Safety
/// `sweep` must be live; outputs must be valid (any may be null).
#[no_mangle]
pub unsafe extern "C" fn pwc_sweep_dip(
    sweep: *const PwcSweep,
    index: usize,
    k: *mut f64,
    indicator: *mut f64,
    multiplicity: *mut usize,
) -> PwcStatus {
    guard(|| {
        let s = &unsafe { handle(sweep, "sweep") }?.0;
        let d = s.dips.get(index).ok_or_else(|| {
            Fail(PwcStatus::InvalidArgument, format!("dip {index} of {}", s.dips.len()))
        })?;
        unsafe {
            if let Some(p) = k.as_mut() {
                *p = d.k_refined;
            }
            if let Some(p) = indicator.as_mut() {
                *p = d.indicator_min;
            }
            if let Some(p) = multiplicity.as_mut() {
                *p = d.multiplicity;
            }
        }
        Ok(())
    })
}

/// Copy the sampled `k` values and indicator values (`len` each).
///
/// # Safety
/// `sweep` must be live; non-null outputs must hold `capacity` values;
/// `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pwc_sweep_samples(
    sweep: *const PwcSweep,
    k: *mut f64,
    indicator: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> PwcStatus {
    guard(|| {
        let s = &unsafe { handle(sweep, "sweep") }?.0;
        let n = s.k_samples.len();
        *unsafe { out(len, "len") }? = n;
        too_small(n, capacity)?;
        if !k.is_null() {
            unsafe { slice_mut(k, n, "k") }?.copy_from_slice(&s.k_samples);
        }
        if !indicator.is_null() {
            unsafe { slice_mut(indicator, n, "indicator") }?.copy_from_slice(&s.indicator);
        }
        Ok(())
    })
}

/// Serialize the sweep as JSON into `buf` (NUL-terminated). `needed`
/// receives the byte length without the NUL, also on `BufferTooSmall`.
///
/// # Safety
/// `sweep` must be live; `buf` must hold `capacity` bytes; `needed` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn pwc_sweep_to_json(
    sweep: *const PwcSweep,
    buf: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> PwcStatus {
    guard(|| {
        let s = &unsafe { handle(sweep, "sweep") }?.0;
        let needed = unsafe { out(needed, "needed") }?;
        let text = s.to_json()?;
        *needed = text.len();
        too_small(text.len() + 1, capacity)?;
        let dst = unsafe { slice_mut(buf.cast::<u8>(), text.len() + 1, "buf") }?;
        dst[..text.len()].copy_from_slice(text.as_bytes());
        dst[text.len()] = 0;
        Ok(())
    })
}

/// Run the verification suite; `passed` and `total` count checks that
/// behaved as intended, negative controls included.
///
/// # Safety
/// Outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn pwc_verify_suite(seed: u64, passed: *mut usize, total: *mut usize) -> PwcStatus {
    guard(|| {
        let (passed, total) = unsafe { (out(passed, "passed")?, out(total, "total")?) };
        let reports = pwcomplete::verify::standard_suite(seed)?;
        *total = reports.len();
        *passed = reports.iter().filter(|r| r.ok()).count();
        Ok(())
    })
}
