//! Error type shared by every module of the library.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("vertex {vertex} is out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },

    #[error("edge {source_vertex} -> {target} has non-positive or non-finite weight {weight}")]
    InvalidWeight {
        source_vertex: usize,
        target: usize,
        weight: f64,
    },

    #[error("duplicate edge {source_vertex} -> {target}")]
    DuplicateEdge { source_vertex: usize, target: usize },

    #[error("matrix is not a Laplacian: {reason}")]
    NotLaplacian { reason: String },

    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: String },

    #[error("graph is not weakly connected")]
    NotWeaklyConnected,

    #[error("leading component {component} has no positive left null vector: {reason}")]
    FrobeniusFailure { component: usize, reason: String },

    #[error("matrix is not semistable: {reason}")]
    NotSemistable { reason: String },

    #[error("Lyapunov/Sylvester solve failed: {reason}")]
    LyapunovSolveFailure { reason: String },

    #[error("system is not in H2 (|C J B| = {residual:e})")]
    NotInH2 { residual: f64 },

    #[error("initial state has a component of {component:e} along the consensus directions")]
    InvalidInitialState { component: f64 },

    #[error("clustering is not a partition of the vertex set: {reason}")]
    InvalidClustering { reason: String },

    #[error("clustering is improper: vertices {i} and {j} share a cell but are not clusterable")]
    ImproperClustering { i: usize, j: usize },

    #[error("requested order {requested} is below the number of clusterable cells {minimum}")]
    OrderTooSmall { requested: usize, minimum: usize },

    #[error("requested order {requested} exceeds the number of vertices {n}")]
    OrderTooLarge { requested: usize, n: usize },

    #[error("clusterable vertices {i} and {j} have zero dissimilarity")]
    ZeroDissimilarityPresent { i: usize, j: usize },

    #[error("reduction error is unbounded (consensus projectors differ by {mismatch:e})")]
    UnboundedError { mismatch: f64 },

    #[error("minimal realization removed every vertex")]
    DegenerateNetwork,

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: String,
        name: String,
        available: String,
    },

    #[error("numerical failure: {reason}")]
    Numerical { reason: String },
}

pub type Result<T> = std::result::Result<T, NetError>;

impl NetError {
    /// Stable identifier used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            NetError::VertexOutOfRange { .. } => "VertexOutOfRange",
            NetError::SelfLoop { .. } => "SelfLoop",
            NetError::InvalidWeight { .. } => "InvalidWeight",
            NetError::DuplicateEdge { .. } => "DuplicateEdge",
            NetError::NotLaplacian { .. } => "NotLaplacian",
            NetError::DimensionMismatch { .. } => "DimensionMismatch",
            NetError::NotWeaklyConnected => "NotWeaklyConnected",
            NetError::FrobeniusFailure { .. } => "FrobeniusFailure",
            NetError::NotSemistable { .. } => "NotSemistable",
            NetError::LyapunovSolveFailure { .. } => "LyapunovSolveFailure",
            NetError::NotInH2 { .. } => "NotInH2",
            NetError::InvalidInitialState { .. } => "InvalidInitialState",
            NetError::InvalidClustering { .. } => "InvalidClustering",
            NetError::ImproperClustering { .. } => "ImproperClustering",
            NetError::OrderTooSmall { .. } => "OrderTooSmall",
            NetError::OrderTooLarge { .. } => "OrderTooLarge",
            NetError::ZeroDissimilarityPresent { .. } => "ZeroDissimilarityPresent",
            NetError::UnboundedError { .. } => "UnboundedError",
            NetError::DegenerateNetwork => "DegenerateNetwork",
            NetError::UnknownStrategy { .. } => "UnknownStrategy",
            NetError::Numerical { .. } => "Numerical",
        }
    }
}
