use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("edge endpoint {endpoint} out of range (graph has {count} vertices)")]
    EndpointOutOfRange { endpoint: usize, count: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("instance too large: {0}")]
    SizeCapExceeded(String),
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("iteration cap reached without convergence (residual {residual:.3e})")]
    NonConvergence { residual: f64 },
    #[error("face of length {0} cannot be triangulated without new vertices")]
    FaceTooShort(usize),
    #[error("odd Euler defect {0}: corrupted rotation system")]
    OddEulerDefect(i64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inclusion map is not edge-preserving: edge ({0}, {1}) has no image edge")]
    NotEdgePreserving(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
