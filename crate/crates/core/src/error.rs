use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("map is not hermiticity-preserving (residual {0:.3e})")]
    NotHermiticityPreserving(f64),

    #[error("map is not completely positive (minimum Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),

    #[error("map is not unital (residual {0:.3e})")]
    NotUnital(f64),

    #[error("map is not trace-preserving (residual {0:.3e})")]
    NotTracePreserving(f64),

    #[error("map is not positive: a PSD input has image with minimum eigenvalue {0:.3e}")]
    NotPositive(f64),

    #[error("map is not idempotent (residual {0:.3e})")]
    NotIdempotent(f64),

    #[error("{what} is not positive semidefinite (minimum eigenvalue {min_eig:.3e})")]
    NotPsd { what: String, min_eig: f64 },

    #[error("{what} is not hermitian (residual {residual:.3e})")]
    NotHermitian { what: String, residual: f64 },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid chain (column {column}): {reason}")]
    InvalidChain { column: usize, reason: String },

    #[error("negative evolution time {0}")]
    NegativeTime(f64),

    #[error("lambda = {lambda} does not exceed the growth bound {bound}")]
    BelowGrowthBound { lambda: f64, bound: f64 },

    #[error("ill-conditioned computation: {0}")]
    IllConditioned(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("dilation requires a contraction, but the channel has norm {0:.6}")]
    NormExceedsOne(f64),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("{0}")]
    Input(String),
}
