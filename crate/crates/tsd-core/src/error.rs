use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    #[error("inversion did not converge at x = {x}: tail estimate {achieved:.3e} above tolerance {requested:.3e}")]
    InversionNonConvergence { x: f64, achieved: f64, requested: f64 },

    #[error("law has an atomic component: {0}")]
    AtomicLaw(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("sampler degenerate: {0}")]
    SamplerDegenerate(String),

    #[error("tabulation failure: {0}")]
    Tabulation(String),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}
