use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The inverse retraction is undefined (`pᵀu <= 0` in some sphere block).
    /// Usually means the step size is too large for the chart.
    #[error("point outside the retraction chart: block {block} has p.u = {dot:e}")]
    Domain { block: usize, dot: f64 },

    #[error("antipodal points: block {block} has |u + v| = {norm:e}")]
    Antipodal { block: usize, norm: f64 },

    #[error("critical point of the first integral: |grad H|^2 = {norm_sq:e}")]
    CriticalPoint { norm_sq: f64 },

    #[error("fixed-point iteration did not converge in {iterations} sweeps (last update {update:e})")]
    NonConvergence { iterations: usize, update: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
