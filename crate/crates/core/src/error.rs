use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("pole at {0}")]
    Pole(String),

    #[error("singular configuration: eta = {eta} lies inside the light-cone window |eta - 1| < {window}")]
    Singular { eta: f64, window: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("polygamma order {0} outside [-2, 4]")]
    InvalidOrder(i32),

    #[error("image sum did not converge after {terms} terms: {reason}")]
    NonConvergence { terms: usize, reason: String },

    #[error("quadrature tolerance not met: achieved error {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    #[error("residual did not settle: value {current:e} at eta {eta_max} vs {previous:e} at half that")]
    ResidualNotConverged { eta_max: f64, previous: f64, current: f64 },

    #[error("unit mismatch: expected {expected}, got {got}")]
    UnitMismatch { expected: String, got: String },
}
