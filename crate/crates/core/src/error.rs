use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid wavenumber {0}: must be positive and finite")]
    InvalidWavenumber(f64),
    #[error("invalid direction: |beta| = {0}, expected a unit vector")]
    InvalidDirection(f64),
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("degenerate surface: {0}")]
    DegenerateSurface(String),
    #[error("unsupported surface: {0}")]
    UnsupportedSurface(String),
    #[error("point outside domain: {0}")]
    Domain(String),
    #[error("ill-posed indicator: {0}")]
    IllPosedIndicator(String),
    #[error("bracket error: {0}")]
    Bracket(String),
    #[error("inconclusive check: {0}")]
    Inconclusive(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_wavenumber(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWavenumber(k))
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::SizeMismatch { expected, actual })
    }
}
