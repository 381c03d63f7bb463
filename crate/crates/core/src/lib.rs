//! Clustering-based model reduction of linear network systems evolving on
//! weighted directed graphs.
//!
//! The pipeline: build the graph Laplacian, bring it to a generalized
//! balanced form, decompose the semistable system matrix, compute pseudo
//! Gramians, strip non-minimal structure, cluster vertices by dissimilarity,
//! project, and bound the H2 reduction error.

pub mod balance;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod network;
pub mod pipeline;
pub mod reduction;
pub mod reduction_error;
pub mod semistable;
pub mod strategy;
pub mod tolerances;

pub use error::{NetError, Result};
pub use tolerances::Tolerances;
