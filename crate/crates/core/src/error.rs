use thiserror::Error;

/// Errors raised while building or analysing a spin system.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin graph: {0}")]
    InvalidGraph(String),

    #[error("model incompatible with graph: {0}")]
    ModelMismatch(String),

    #[error("operator is not Hermitian (max |H - H^dag| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("Hilbert space dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator does not commute with {what} (max entry {residual:e})")]
    SymmetryBroken { what: &'static str, residual: f64 },

    #[error("iterative eigensolver did not converge (residual {residual:e} after {iterations} steps)")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("map is not an isometry (max |V^dag V - 1| = {residual:e})")]
    NotIsometric { residual: f64 },

    #[error("quadrature did not converge: successive refinements differ by {difference:e}")]
    Quadrature { difference: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
