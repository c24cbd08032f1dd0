use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric: asymmetry {residual:.3e} exceeds {bound:.3e}")]
    NotSymmetric { residual: f64, bound: f64 },

    #[error("matrix is not antisymmetric: residual {residual:.3e} exceeds {bound:.3e}")]
    NotAntisymmetric { residual: f64, bound: f64 },

    #[error("matrix is numerically singular: smallest singular value {sigma_min:.3e} <= {threshold:.3e}")]
    Singular { sigma_min: f64, threshold: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {eigenvalue:.3e}")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("channel is not completely positive: noise obstruction eigenvalue {eigenvalue:.3e}")]
    NotCompletelyPositive { eigenvalue: f64 },

    #[error("degenerate noise form: {0}")]
    DegenerateNoise(String),

    #[error("identity `{identity}` failed: residual {residual:.3e} exceeds {bound:.3e}")]
    ResidualExceeded {
        identity: &'static str,
        residual: f64,
        bound: f64,
    },

    #[error("duality undefined: {0}")]
    DualityUndefined(String),

    #[error("operator is not trace-normalized: |tr - 1| = {defect:.3e}")]
    NotNormalized { defect: f64 },

    #[error("grid rejected: {0}")]
    GridGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
