//! Spherical Bessel/Hankel functions, Bessel zeros, normalized associated
//! Legendre functions, complex spherical harmonics and Gauss–Legendre rules.
//!
//! Conventions: harmonics are orthonormal on the unit sphere and carry the
//! Condon–Shortley phase, `Y_{l,-m} = (-1)^m conj(Y_{l,m})`.

use std::f64::consts::{FRAC_PI_8, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported degree.
pub const MAX_DEGREE: usize = 64;

/// Degree/order pair of a spherical harmonic, `|m| <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub l: usize,
    pub m: i64,
}

impl HarmonicIndex {
    pub fn new(l: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > l {
            return Err(Error::InvalidArgument(format!(
                "harmonic order |m| = {} exceeds degree l = {l}",
                m.abs()
            )));
        }
        if l > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "degree {l} above supported maximum {MAX_DEGREE}"
            )));
        }
        Ok(Self { l, m })
    }

    /// All indices with degree `<= l_max`, ordered by `l` then `m`.
    pub fn all_up_to(l_max: usize) -> Vec<Self> {
        (0..=l_max)
            .flat_map(|l| (-(l as i64)..=l as i64).map(move |m| Self { l, m }))
            .collect()
    }
}

fn check_arg(l: usize, x: f64) -> Result<()> {
    if l > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "degree {l} above supported maximum {MAX_DEGREE}"
        )));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "argument must be finite and nonnegative, got {x}"
        )));
    }
    Ok(())
}

/// Spherical Bessel function of the first kind `j_l(x)`.
pub fn sph_bessel_j(l: usize, x: f64) -> Result<f64> {
    check_arg(l, x)?;
    Ok(bessel_j_unchecked(l, x))
}

pub(crate) fn bessel_j_unchecked(l: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    if x < 1.0 {
        return j_series(l, x);
    }
    match l {
        0 => x.sin() / x,
        1 => x.sin() / (x * x) - x.cos() / x,
        _ if x >= l as f64 => j_upward(l, x),
        _ => j_miller(l, x),
    }
}

/// Ascending power series, accurate for small arguments at any degree.
fn j_series(l: usize, x: f64) -> f64 {
    let mut lead = 1.0;
    for i in 1..=l {
        lead *= x / (2 * i + 1) as f64;
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn j_upward(l: usize, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let mut prev = s / x;
    let mut cur = s / (x * x) - c / x;
    for n in 1..l {
        let next = (2 * n + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Miller downward recurrence normalized by `sum (2n+1) j_n^2 = 1`.
fn j_miller(l: usize, x: f64) -> f64 {
    let start = 2 * l + 40 + x.ceil() as usize;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for n in (1..=start).rev() {
        vals[n - 1] = (2 * n + 1) as f64 / x * vals[n] - vals[n + 1];
        if vals[n - 1].abs() > 1e200 {
            for v in vals.iter_mut() {
                *v *= 1e-200;
            }
        }
    }
    let peak = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in vals.iter_mut() {
        *v /= peak;
    }
    let norm: f64 = vals
        .iter()
        .enumerate()
        .map(|(n, v)| (2 * n + 1) as f64 * v * v)
        .sum::<f64>()
        .sqrt();
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let sign = if j0.abs() >= j1.abs() {
        (j0 * vals[0]).signum()
    } else {
        (j1 * vals[1]).signum()
    };
    sign * vals[l] / norm
}

/// Spherical Bessel function of the second kind `y_l(x)`, `x > 0`.
pub fn sph_bessel_y(l: usize, x: f64) -> Result<f64> {
    check_arg(l, x)?;
    if x == 0.0 {
        return Err(Error::InvalidArgument("y_l is singular at x = 0".into()));
    }
    Ok(bessel_y_unchecked(l, x))
}

fn bessel_y_unchecked(l: usize, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let mut prev = -c / x;
    if l == 0 {
        return prev;
    }
    let mut cur = -c / (x * x) - s / x;
    for n in 1..l {
        let next = (2 * n + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Derivative `j_l'(x)` from `j_l' = j_{l-1} - (l+1)/x j_l` (and `j_0' = -j_1`).
pub fn sph_bessel_j_deriv(l: usize, x: f64) -> Result<f64> {
    check_arg(l, x)?;
    Ok(bessel_j_deriv_unchecked(l, x))
}

pub(crate) fn bessel_j_deriv_unchecked(l: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if l == 1 { 1.0 / 3.0 } else { 0.0 };
    }
    if l == 0 {
        return -bessel_j_unchecked(1, x);
    }
    bessel_j_unchecked(l - 1, x) - (l + 1) as f64 / x * bessel_j_unchecked(l, x)
}

/// Derivative `y_l'(x)`, `x > 0`.
pub fn sph_bessel_y_deriv(l: usize, x: f64) -> Result<f64> {
    sph_bessel_y(l, x)?;
    if l == 0 {
        return Ok(-bessel_y_unchecked(1, x));
    }
    Ok(bessel_y_unchecked(l - 1, x) - (l + 1) as f64 / x * bessel_y_unchecked(l, x))
}

/// Spherical Hankel function of the first kind `h_l^(1)(x) = j_l(x) + i y_l(x)`.
pub fn sph_hankel1(l: usize, x: f64) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Hankel argument must be positive, got {x}"
        )));
    }
    check_arg(l, x)?;
    Ok(Complex64::new(
        bessel_j_unchecked(l, x),
        bessel_y_unchecked(l, x),
    ))
}

/// The `n`-th positive zero of `j_l`, `n >= 1`.
///
/// Sign changes are bracketed on a grid of spacing π/8 starting just above
/// `l` (the first zero exceeds `l`, and consecutive zeros are at least π
/// apart), then bisected to machine precision.
pub fn bessel_zero(l: usize, n: usize) -> Result<f64> {
    check_arg(l, 0.0)?;
    if n == 0 {
        return Err(Error::InvalidArgument("zero index n must be >= 1".into()));
    }
    let mut lo = l as f64 + 1e-3;
    let mut f_lo = bessel_j_unchecked(l, lo);
    let mut found = 0;
    loop {
        let hi = lo + FRAC_PI_8;
        let f_hi = bessel_j_unchecked(l, hi);
        if f_hi == 0.0 {
            found += 1;
            if found == n {
                return Ok(hi);
            }
        } else if f_lo * f_hi < 0.0 {
            found += 1;
            if found == n {
                return Ok(bisect_root(l, lo, hi, f_lo));
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
}

fn bisect_root(l: usize, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = bessel_j_unchecked(l, mid);
        if fm == 0.0 {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    let fa = bessel_j_unchecked(l, a);
    let fb = bessel_j_unchecked(l, b);
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}

/// Normalized associated Legendre function for `m >= 0`, including the
/// Condon–Shortley phase and the `1/sqrt(4π)`-style factor so that
/// `Y_lm = legendre_normalized(l, m, θ) e^{imφ}`. Returns the value and its
/// derivative with respect to θ.
pub fn legendre_normalized(l: usize, m: usize, theta: f64) -> (f64, f64) {
    debug_assert!(m <= l);
    let (st, ct) = theta.sin_cos();
    let value = |deg: usize, st: f64, ct: f64| -> (f64, f64) {
        // p_mm, then upward in degree; returns (P_deg, P_{deg-1})
        let mut pmm = 1.0 / (4.0 * PI).sqrt();
        for i in 1..=m {
            pmm *= -((2 * i + 1) as f64 / (2 * i) as f64).sqrt() * st;
        }
        if deg == m {
            return (pmm, 0.0);
        }
        let mut p_prev = pmm;
        let mut p_cur = ((2 * m + 3) as f64).sqrt() * ct * pmm;
        for d in (m + 2)..=deg {
            let d2 = (d * d) as f64;
            let m2 = (m * m) as f64;
            let a = ((4.0 * d2 - 1.0) / (d2 - m2)).sqrt();
            let dm1 = (d - 1) as f64;
            let b = ((dm1 * dm1 - m2) / (4.0 * dm1 * dm1 - 1.0)).sqrt();
            let next = a * (ct * p_cur - b * p_prev);
            p_prev = p_cur;
            p_cur = next;
        }
        (p_cur, p_prev)
    };
    let (p, p_lower) = value(l, st, ct);
    // sinθ dP_l/dθ = l cosθ P_l - sqrt((2l+1)/(2l-1) (l^2 - m^2)) P_{l-1}
    let st_safe = if st.abs() < 1e-12 { 1e-12 } else { st };
    let lf = l as f64;
    let mf = m as f64;
    let coupling = if l > m {
        ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf * lf - mf * mf)).sqrt()
    } else {
        0.0
    };
    let dp = (lf * ct * p - coupling * p_lower) / st_safe;
    (p, dp)
}

/// Orthonormal complex spherical harmonic `Y_lm(θ, φ)`.
pub fn sph_harm(idx: HarmonicIndex, theta: f64, phi: f64) -> Complex64 {
    sph_harm_with_dtheta(idx, theta, phi).0
}

/// `Y_lm(θ, φ)` together with `∂Y_lm/∂θ`; `∂Y_lm/∂φ = i m Y_lm`.
pub fn sph_harm_with_dtheta(idx: HarmonicIndex, theta: f64, phi: f64) -> (Complex64, Complex64) {
    let ma = idx.m.unsigned_abs() as usize;
    let (p, dp) = legendre_normalized(idx.l, ma, theta);
    let phase = Complex64::from_polar(1.0, ma as f64 * phi);
    let (y, dy) = (phase * p, phase * dp);
    if idx.m >= 0 {
        (y, dy)
    } else {
        let sign = if ma.is_multiple_of(2) { 1.0 } else { -1.0 };
        (y.conj() * sign, dy.conj() * sign)
    }
}

/// Checked variant of [`sph_harm`] for raw `(l, m)` input.
pub fn sph_harm_checked(l: usize, m: i64, theta: f64, phi: f64) -> Result<Complex64> {
    let idx = HarmonicIndex::new(l, m)?;
    Ok(sph_harm(idx, theta, phi))
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_p_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_p_and_deriv(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_p_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}
