use thiserror::Error;

/// Errors shared across the solver library.
#[derive(Debug, Error)]
pub enum OtError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("marginal totals differ: {left} vs {right}")]
    UnbalancedTotals { left: f64, right: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty working set")]
    EmptyWorkingSet,

    #[error("row/column budgets unbalanced by {imbalance:e} (limit 1e-10)")]
    UnbalancedBudgets { imbalance: f64 },

    #[error(
        "cycling safeguard exceeded after {pivots} pivots ({arcs} arcs, {nodes} nodes, \
         last objective {objective})"
    )]
    CyclingSafeguard {
        pivots: usize,
        arcs: usize,
        nodes: usize,
        objective: f64,
    },

    #[error("input is not a null-space direction (max line-sum residual {residual:e})")]
    NotNullDirection { residual: f64 },

    #[error("momentum support of size {support} does not exceed {required} cells")]
    MomentumSupportTooSmall { support: usize, required: usize },

    #[error("unknown dataset family `{0}`")]
    UnknownFamily(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, OtError>;
