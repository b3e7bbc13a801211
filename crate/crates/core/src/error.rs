use thiserror::Error;

use crate::diagram::EdgeId;

/// Errors raised across diagram handling, complex construction and movie maps.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KhError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed crossing `{0}`: expected exactly 4 edge ids")]
    MalformedCrossing(String),
    #[error("edge {edge} occurs {count} times (expected 2)")]
    DanglingEdge { edge: EdgeId, count: usize },
    #[error("orientation conflict on edge {0}")]
    OrientationConflict(EdgeId),
    #[error("basepoint {0} is not an edge of the diagram")]
    InvalidBasepoint(EdgeId),
    #[error("invalid tangle: {0}")]
    InvalidTangle(String),
    #[error("vertex has length {got}, diagram has {expected} crossings")]
    LengthMismatch { expected: usize, got: usize },
    #[error("diagram has no basepoint")]
    MissingBasepoint,
    #[error("invalid move site: {0}")]
    InvalidSite(String),
    #[error("move touches the basepoint edge {0}")]
    BasepointTouched(EdgeId),
    #[error("complex mismatch: {0}")]
    ComplexMismatch(String),
    #[error("not a chain map: {0}")]
    NotAChainMap(String),
    #[error("integral lift of a mod 2 cycle has an odd boundary coefficient at bidegree ({i}, {j})")]
    LiftInconsistency { i: i32, j: i32 },
    #[error("check `{check}` failed at bidegree ({i}, {j}): {detail}")]
    CheckFailed {
        check: String,
        i: i32,
        j: i32,
        detail: String,
    },
    #[error("empty tangle list")]
    EmptyList,
    #[error("move {index}: {source}")]
    AtMove {
        index: usize,
        #[source]
        source: Box<KhError>,
    },
}

impl KhError {
    pub(crate) fn at_move(self, index: usize) -> KhError {
        KhError::AtMove { index, source: Box::new(self) }
    }

    /// The error with any move-index wrapper removed.
    pub fn root(&self) -> &KhError {
        match self {
            KhError::AtMove { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, KhError>;
