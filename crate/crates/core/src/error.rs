use crate::algebra::Model;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AmError {
    #[error("model mismatch: {left:?} vs {right:?}")]
    ModelMismatch { left: Model, right: Model },
    #[error("domination fails: {0}")]
    NotDominated(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("containment violated: {0}")]
    ContainmentViolated(String),
    #[error("incompatible data: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, AmError>;
