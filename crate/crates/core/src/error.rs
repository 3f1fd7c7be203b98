use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("region has no vertices")]
    EmptyRegion,

    #[error("not a proper orthochronous Lorentz transformation: {0}")]
    NotLorentz(String),

    #[error("matrix is not antisymmetric with respect to the metric (residual {0:e})")]
    NotWarping(f64),

    #[error("truncation overflow: result needs {needed} particles but n_max is {n_max}")]
    TruncationOverflow { needed: usize, n_max: usize },

    #[error("velocity supports violate the {direction} ordering for this wedge")]
    OrderingViolation { direction: &'static str },

    #[error("profile is undefined at momentum transfer {0:?}")]
    ProfileUndefined(Vec<f64>),

    #[error("quadrature under-resolved: {0}")]
    UnderResolved(String),

    #[error("operator domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
