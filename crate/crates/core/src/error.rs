use thiserror::Error;

use crate::codec::CodecError;

/// Errors raised while decoding labels. Kept small so the hot decode path
/// stays cheap.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("identical labels")]
    IdenticalLabels,
    #[error("malformed label: {0}")]
    Malformed(&'static str),
    #[error("labels come from a different scheme than the archive")]
    SchemeMismatch,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex outside embedding: {0}")]
    VertexOutsideEmbedding(usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("treewidth exceeds hint {hint}")]
    ExceedsHint { hint: usize },
    #[error("element {index} too heavy: weight exceeds eps times the total")]
    ElementTooHeavy { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("archive: {0}")]
    Archive(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
