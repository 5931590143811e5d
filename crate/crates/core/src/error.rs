use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not interior to the domain (margin {margin:e})")]
    NotInterior { margin: f64 },

    #[error("point is not on the domain boundary (margin {margin:e})")]
    NotOnBoundary { margin: f64 },

    #[error("points coincide within tolerance")]
    CoincidentPoints,

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("affine map is singular (relative determinant {0:e})")]
    SingularMap(f64),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("containment violated: {0}")]
    Containment(String),

    #[error("boundary hit lies at infinity")]
    HitAtInfinity,

    #[error("points are not collinear (relative offset {0:e})")]
    NotCollinear(f64),

    #[error("degenerate triangle")]
    DegenerateTriangle,

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("domain file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub(crate) fn check_finite(p: &crate::Point) -> Result<()> {
    if p.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}
