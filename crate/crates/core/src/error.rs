use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("polygon is not strictly convex at vertex {index}")]
    NonConvex { index: usize },
    #[error("degenerate body: {0}")]
    Degenerate(&'static str),
    #[error("operation not supported for this body: {0}")]
    UnsupportedVariant(&'static str),
    #[error("level set is empty (s >= inradius)")]
    LevelEmpty,
    #[error("outward normal undefined at this boundary point")]
    NormalUndefined,
    #[error("point is not on the boundary")]
    NotOnBoundary,
    #[error("parameter `{name}` out of range: {detail}")]
    ParamOutOfRange { name: &'static str, detail: String },
    #[error("time must be positive")]
    NonpositiveTime,
    #[error("point lies outside the domain")]
    OutOfDomain,
    #[error("series needs {terms} terms; use the image expansion")]
    SeriesTooLong { terms: u64 },
    #[error("quadrature did not converge (estimate {estimate}, error {error})")]
    QuadratureFailure { estimate: f64, error: f64 },
    #[error("power-law fit needs at least three positive pairs")]
    NonpositiveData,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn out_of_range(name: &'static str, detail: impl Into<String>) -> Error {
    Error::ParamOutOfRange {
        name,
        detail: detail.into(),
    }
}
