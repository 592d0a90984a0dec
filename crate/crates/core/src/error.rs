use thiserror::Error;

/// Errors raised by the function-space routines.
///
/// Divergent Dirichlet integrals and missing radial limits are *values*
/// (see [`crate::dirichlet::DirichletValue`] and [`crate::disk::RadialLimit`]),
/// not errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HbdError {
    #[error("singular inner factor evaluated at its atom (angle {angle})")]
    AtomEvaluation { angle: f64 },

    #[error("point with |z| = {radius} is beyond the resolvable radius {limit}")]
    TooCloseToBoundary { radius: f64, limit: f64 },

    #[error("quadrature failed to stabilize: {0}")]
    QuadratureDiverged(String),

    #[error("not in H2: {0}")]
    NotInH2(String),

    #[error("no unimodular radial limit at angle {angle} (|b| -> {modulus})")]
    BoundaryValueMissing { angle: f64, modulus: f64 },

    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("I - zeta X is numerically singular (condition number {condition:e})")]
    SingularResolvent { condition: f64 },

    #[error("measure support meets the spectrum (separation {distance})")]
    SeparationViolated { distance: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, HbdError>;
