//! Dense complex linear algebra on top of `faer`.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = Mat<Complex64>;

fn svd_err(e: impl std::fmt::Debug) -> Error {
    Error::Numerical(format!("SVD did not converge: {e:?}"))
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values().map_err(svd_err)
}

/// Stack `top` over `bottom`.
pub fn vstack(top: MatRef<'_, Complex64>, bottom: MatRef<'_, Complex64>) -> CMat {
    assert_eq!(top.ncols(), bottom.ncols());
    let (p, q) = (top.nrows(), bottom.nrows());
    Mat::from_fn(p + q, top.ncols(), |i, j| {
        if i < p {
            top[(i, j)]
        } else {
            bottom[(i - p, j)]
        }
    })
}

fn r_factor(a: MatRef<'_, Complex64>) -> CMat {
    if a.nrows() <= a.ncols() {
        return a.to_owned();
    }
    a.qr().thin_R().to_owned()
}

/// Result of orthonormalizing the columns of `[top; bottom]`.
#[derive(Debug, Clone)]
pub struct SubspaceSplit {
    /// Singular values of the top-row block of the orthonormal basis,
    /// ascending; one per retained basis vector.
    pub top_singular_values: Vec<f64>,
    /// Numerical rank of the stacked matrix.
    pub rank: usize,
}

/// Orthonormalize the column space of `[top; bottom]` (singular values below
/// `rtol · σ_max` are discarded) and return the singular values of the
/// top-row block of that basis. They are the sines of the principal angles
/// between the column space and vectors supported on the bottom rows.
///
/// Each block is first reduced to its `R` factor, which leaves
/// `‖top x‖` and `‖bottom x‖` unchanged for every coefficient vector `x`.
pub fn subspace_split(
    top: MatRef<'_, Complex64>,
    bottom: MatRef<'_, Complex64>,
    rtol: f64,
) -> Result<SubspaceSplit> {
    let rt = r_factor(top);
    let rb = r_factor(bottom);
    let stacked = vstack(rt.as_ref(), rb.as_ref());
    let svd = stacked.thin_svd().map_err(svd_err)?;
    let s = svd.S().column_vector();
    let smax = if s.nrows() > 0 { s[0].re } else { 0.0 };
    if !(smax > 0.0) {
        return Err(Error::Numerical("stacked matrix is zero".into()));
    }
    let rank = (0..s.nrows()).take_while(|&i| s[i].re > rtol * smax).count();
    let u = svd.U();
    let top_block = u.submatrix(0, 0, rt.nrows(), rank);
    let mut sv = singular_values(top_block)?;
    // retained directions invisible to a short top block
    sv.resize(rank, 0.0);
    sv.sort_by(f64::total_cmp);
    Ok(SubspaceSplit {
        top_singular_values: sv,
        rank,
    })
}

/// Solution of a regularized least-squares problem.
#[derive(Debug, Clone)]
pub struct RidgeSolution {
    pub x: Vec<Complex64>,
    /// `A x`, formed from the SVD factors so that it does not carry the
    /// amplified rounding of `x` along tiny singular directions.
    pub fitted: Vec<Complex64>,
}

/// Regularized least squares `min ‖A x − b‖² + ridge ‖x‖²` via the SVD.
///
/// `ridge = 0` gives the truncated pseudo-inverse solution with cutoff
/// `max(m, n) · ε · σ_max`.
pub fn solve_ridge(a: MatRef<'_, Complex64>, b: &[Complex64], ridge: f64) -> Result<RidgeSolution> {
    assert_eq!(a.nrows(), b.len());
    if !(ridge >= 0.0) {
        return Err(Error::InvalidArgument(format!("ridge must be >= 0, got {ridge}")));
    }
    let svd = a.thin_svd().map_err(svd_err)?;
    let s = svd.S().column_vector();
    let u = svd.U();
    let v = svd.V();
    let smax = if s.nrows() > 0 { s[0].re } else { 0.0 };
    let cutoff = a.nrows().max(a.ncols()) as f64 * f64::EPSILON * smax;
    let mut x = vec![Complex64::new(0.0, 0.0); a.ncols()];
    let mut fitted = vec![Complex64::new(0.0, 0.0); a.nrows()];
    for i in 0..s.nrows() {
        let si = s[i].re;
        let filter = if ridge > 0.0 {
            si / (si * si + ridge)
        } else if si > cutoff {
            1.0 / si
        } else {
            0.0
        };
        if filter == 0.0 {
            continue;
        }
        let coef: Complex64 = (0..u.nrows()).map(|r| u[(r, i)].conj() * b[r]).sum::<Complex64>() * filter;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += v[(j, i)] * coef;
        }
        let fcoef = coef * si;
        for (r, fr) in fitted.iter_mut().enumerate() {
            *fr += u[(r, i)] * fcoef;
        }
    }
    Ok(RidgeSolution { x, fitted })
}

/// `A x`.
pub fn matvec(a: MatRef<'_, Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![Complex64::new(0.0, 0.0); a.nrows()];
    for (j, xj) in x.iter().enumerate() {
        let col = a.col(j);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += col[i] * xj;
        }
    }
    y
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Smallest singular value of a square matrix by inverse iteration on
/// `(A^H A)^{-1}` with one LU factorization.
pub fn smallest_singular_value(a: MatRef<'_, Complex64>) -> Result<f64> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::InvalidArgument("square nonempty matrix required".into()));
    }
    let lu = a.partial_piv_lu();
    let mut x = Mat::<Complex64>::from_fn(n, 1, |i, _| {
        let t = i as f64;
        Complex64::new(1.0 + 0.5 * (1.7 * t).sin(), 0.3 * (0.9 * t).cos())
    });
    let mut mu_prev = 0.0;
    let mut mu = 0.0;
    for _ in 0..200 {
        let nrm = x.norm_l2();
        x /= faer::Scale(Complex64::new(nrm, 0.0));
        let mut y = x.clone();
        lu.solve_adjoint_in_place(y.as_mut());
        lu.solve_in_place(y.as_mut());
        mu = (0..n).map(|i| x[(i, 0)].conj() * y[(i, 0)]).sum::<Complex64>().re;
        if !mu.is_finite() {
            return Ok(0.0);
        }
        if (mu - mu_prev).abs() <= 1e-10 * mu.abs() {
            break;
        }
        mu_prev = mu;
        x = y;
    }
    if !(mu > 0.0) {
        return Ok(0.0);
    }
    Ok(1.0 / mu.sqrt())
}
