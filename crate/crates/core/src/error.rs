use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("weight exponent alpha = {0} is outside [0, 2)")]
    InvalidAlpha(f64),

    #[error("cell ({0}, {1}) straddles the degeneracy point 0")]
    StraddlingCell(f64, f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("linear solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    LinearResidual { residual: f64, tolerance: f64 },

    #[error("singular matrix (zero pivot at row {row})")]
    Singular { row: usize },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    EigenNotConverged { iterations: usize },

    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    #[error("hypothesis certification failed: {0}")]
    Certification(String),

    #[error("invalid problem data: {0}")]
    InvalidProblem(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("singular Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize, iterate: Vec<f64> },

    #[error("line search stagnated at iteration {iteration} (residual {residual:e})")]
    LineSearchStagnation { iteration: usize, residual: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("monotone iteration lost monotonicity at iteration {iteration} (drop {drop:e})")]
    NonMonotone { iteration: usize, drop: f64 },

    #[error("deflated solve returned a known solution (distance {distance:e})")]
    DeflationCollapsed { distance: f64 },

    #[error("bracket precondition violated: {0}")]
    Bracket(String),

    #[error("degenerate index for solution {position} in region")]
    DegenerateIndex { position: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),
}
