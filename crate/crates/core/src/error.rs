use thiserror::Error;

use crate::graph::Edge;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("link price must be nonnegative, got {0}")]
    NegativeAlpha(String),
    #[error("{0} is not an edge of the host graph")]
    NotHostEdge(Edge),
    #[error("player {0} does not exist")]
    UnknownPlayer(usize),
    #[error("negative payment {amount} by player {player} on {edge}")]
    NegativePayment {
        edge: Edge,
        player: usize,
        amount: String,
    },
    #[error("strategy covers {got} players but the host has {expected} vertices")]
    StrategyShape { expected: usize, got: usize },
    #[error("strategy model does not match the requested model")]
    ModelMismatch,
    #[error(
        "player {player} has host degree {degree}, above the exact enumeration cap of {cap}; use local mode"
    )]
    DegreeCap {
        player: usize,
        degree: usize,
        cap: usize,
    },
    #[error("host has {edges} edges, above the exhaustive enumeration cap of {cap}")]
    EdgeCap { edges: usize, cap: usize },
    #[error("host graph is disconnected")]
    DisconnectedHost,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cost must be finite and positive: {0}")]
    InvalidCost(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
