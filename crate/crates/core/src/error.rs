use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("omega = {omega} outside the admissible range {range}")]
    OmegaOutOfRange { omega: f64, range: &'static str },

    /// Stationary solutions exist only for 0 < ω < 3/16.
    #[error("no solitary wave exists for omega = {omega} (requires 0 < omega < 3/16)")]
    NoSoliton { omega: f64 },

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("numerical blowup at t = {t}")]
    NumericalBlowup { t: f64 },

    #[error("no negative-energy minimizer at mass {rho}: {reason}")]
    NoNegativeEnergyMinimizer { rho: f64, reason: String },

    #[error("dimension error: expected d = {expected}, got d = {got}")]
    DimensionError { expected: usize, got: usize },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("edge mass fraction {fraction:.3e} exceeds {limit:.1e}")]
    EdgeMass { fraction: f64, limit: f64 },

    #[error("eigensolver failure: {0}")]
    EigenFailure(String),

    #[error("spectral assumption violated at omega = {omega}: {detail}")]
    AssumptionViolated { omega: f64, detail: String },

    #[error("not enough data: {0}")]
    NotEnoughData(String),

    #[error("mass minimum sits on the sweep boundary at omega = {omega}")]
    BoundaryMinimum { omega: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
