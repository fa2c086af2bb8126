use thiserror::Error;

use crate::deformation::FamilyId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid physical parameter: {0}")]
    InvalidParameter(String),

    /// A finite-difference partial derivative came out non-finite. The index
    /// runs over `(x1, x2, x3, p1, p2, p3)`.
    #[error("non-finite partial derivative with respect to phase-space coordinate {index}")]
    NumericalFailure { index: usize },

    #[error("integration diverged at t = {t}")]
    Divergence { t: f64 },

    #[error("closed-form solutions require t0 = 0, got t0 = {t0}")]
    UnsupportedOrigin { t0: f64 },

    #[error("no matching transformation exists for family {0}")]
    NoMatch(FamilyId),
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {value}")))
    }
}
