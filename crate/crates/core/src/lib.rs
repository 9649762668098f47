//! Numerical testbed for completeness of plane-wave traces `e^{ik β·s}` on
//! closed surfaces: special functions, surface quadratures, Herglotz
//! superpositions, Dirichlet-eigenvalue oracles, completeness sweeps and
//! step-by-step verification checks.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geom;
pub mod herglotz;
pub mod linalg;
pub mod surface;
pub mod specfun;
pub mod spectra;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
