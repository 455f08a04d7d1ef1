use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not skew-symmetric (residual {residual:.3e})")]
    NonSkewInput { residual: f64 },

    #[error("matrix is not symmetric (residual {residual:.3e})")]
    NonSymmetricInput { residual: f64 },

    #[error("matrix is not a rotation (orthogonality error {orthogonality:.3e}, det {det})")]
    NotARotation { orthogonality: f64, det: f64 },

    #[error("body mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("invalid body model: {0}")]
    InvalidBody(String),

    #[error("point masses are {separation:.3e} apart, below the minimum separation")]
    BodiesOverlap { separation: f64 },

    #[error("moment of inertia is singular")]
    SingularInertia,

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NoConvergence { iterations: u32, residual: f64 },

    #[error("singular Jacobian in Newton iteration")]
    SingularJacobian,

    #[error("rotation update {norm:.3} rad is outside the solver capture basin")]
    OutsideCaptureBasin { norm: f64 },

    #[error("invalid step size {0}")]
    InvalidStep(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid physical units: {0}")]
    InvalidPhysicalUnits(String),
}

pub type Result<T> = std::result::Result<T, Error>;
