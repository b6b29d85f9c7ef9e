use thiserror::Error;

use crate::graph::VertexId;

/// Errors produced by the oracle library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("total arc weight does not fit in 63 bits")]
    WeightOverflow,

    #[error("graph size overflow: {0}")]
    SizeOverflow(String),

    #[error("unknown vertex {0}")]
    InvalidVertex(VertexId),

    #[error("unknown arc {0}")]
    InvalidArc(u32),

    #[error("query endpoint {0} is in the failure set")]
    EndpointFailed(VertexId),

    #[error("query endpoint {0} has been deleted")]
    EndpointDeleted(VertexId),

    #[error("{given} failures exceed the oracle capacity of {capacity}")]
    TooManyFailures { given: usize, capacity: usize },

    #[error("r = {0} is not a marked r-division size")]
    UnmarkedR(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tuple pieces do not belong to a single r-division")]
    MixedRDivision,

    #[error("duplicate piece {0} in tuple")]
    DuplicatePiece(u32),

    #[error("forbidden vertex {0} lies inside the starting piece")]
    ForbiddenInStartPiece(VertexId),

    #[error("source vertex {0} is not part of the union")]
    SourceNotInUnion(VertexId),

    #[error("edge insertion violates planarity: {0}")]
    Planarity(String),

    #[error("malformed oracle file: {0}")]
    Format(String),

    #[error("monge strategy not compiled in (enable the `monge` feature)")]
    StrategyUnavailable,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
