use thiserror::Error;

/// Errors raised by the classical, model, wavefunction and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("schedule domain error: {0}")]
    ScheduleDomain(String),

    #[error("degenerate initial conditions: |Omega| = {omega:e} is below {threshold:e}")]
    DegenerateInitialConditions { omega: f64, threshold: f64 },

    #[error("u and v became linearly dependent at t = {t}: rho = {rho:e}")]
    LinearDependence { t: f64, rho: f64 },

    #[error("t = {t} lies outside the span [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("stencil violation: {0}")]
    Stencil(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error("unsupported construction: {0}")]
    UnsupportedConstruction(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("method error: {0}")]
    Method(String),

    #[error("particle indices ({i}, {j}) invalid for {len} coordinates")]
    Index { i: usize, j: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
