use thiserror::Error;

/// Errors raised by the solver, the problem suite and the experiment harness.
#[derive(Debug, Error)]
pub enum FdError {
    #[error("objective evaluation produced a non-finite value in component {index}")]
    Evaluation { index: usize },

    #[error("jacobian evaluation produced a non-finite entry at ({row}, {col})")]
    JacobianEvaluation { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("dual simplex solver did not converge (KKT residual {residual:e})")]
    DualNonConvergence { residual: f64 },

    #[error("hessian of objective {objective} is not symmetric")]
    NonSymmetricHessian { objective: usize },

    #[error("cholesky factorization failed: metric is not positive definite")]
    NotPositiveDefinite,

    #[error("armijo line search exhausted {backtracks} backtracks")]
    LineSearch { backtracks: usize },

    #[error("problem `{name}` does not admit n = {n}")]
    Inadmissible { name: String, n: usize },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<FdError>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("malformed file {path}: {reason}")]
    Format { path: String, reason: String },
}

pub type Result<T, E = FdError> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> FdError {
    FdError::Contract(msg.into())
}
