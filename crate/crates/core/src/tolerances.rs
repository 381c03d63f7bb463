//! Numerical tolerances shared by the pipeline.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Rank and nullspace threshold multiplier: `rank * n * eps * sigma_max`.
    pub rank: f64,
    /// Relative residual accepted for Lyapunov, Sylvester and consistency checks.
    pub residual: f64,
    /// Relative threshold for the clusterability test.
    pub clusterability: f64,
    /// Relative threshold for detecting 0-dissimilar vertex pairs.
    pub zero_dissimilarity: f64,
    /// Largest accepted condition number of the biorthogonalization matrix.
    pub max_condition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 10.0,
            residual: 1e-8,
            clusterability: 1e-8,
            zero_dissimilarity: 1e-10,
            max_condition: 1e8,
        }
    }
}
