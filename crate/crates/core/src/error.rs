use crate::constellation::NodeId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension too small: {what} = {value}, minimum is {min}")]
    DimensionTooSmall {
        what: &'static str,
        value: usize,
        min: usize,
    },
    #[error("gateway phase {phase} out of range for {sats_per_plane} satellites per plane")]
    InvalidGatewayPhase { phase: usize, sats_per_plane: usize },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no edge between {0} and {1}")]
    UnknownEdge(NodeId, NodeId),
    #[error("malformed topology: {0}")]
    MalformedTopology(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid route {route}: {reason}")]
    InvalidRoute { route: String, reason: String },
    #[error("route enumeration exceeds the ceiling of {ceiling} routes")]
    EnumerationCeiling { ceiling: usize },
    #[error("negative or non-finite edge weight {weight} on edge {edge}")]
    NegativeWeight { edge: usize, weight: f64 },
    #[error("reconstructed path is not simple: {0}")]
    NonSimplePath(String),
    #[error("malformed LP: {0}")]
    MalformedLp(String),
    #[error("LP solve ended with status {0:?}")]
    LpStatus(crate::lp::LpStatus),
    #[error("scenario schema violation: {0}")]
    Schema(String),
    #[error("unknown unit {0:?}")]
    UnknownUnit(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
