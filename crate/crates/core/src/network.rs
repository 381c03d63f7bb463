//! Network systems `x' = -L x + F u`, `y = H x`.

use nalgebra::{DMatrix, DVector};

use crate::balance::{build_balanced_form_grounded, BalancedForm};
use crate::error::{NetError, Result};
use crate::graph::{build_laplacian, scc_decompose, DiGraph, SccDecomposition};
use crate::semistable::{decompose, SemistableDecomposition};
use crate::tolerances::Tolerances;

/// A network system. Its state matrix is the graph Laplacian plus an
/// optional nonnegative diagonal `grounding`, which appears when vertices
/// feeding the network have been removed.
#[derive(Debug, Clone)]
pub struct NetworkSystem {
    pub graph: DiGraph,
    pub grounding: DVector<f64>,
    pub laplacian: DMatrix<f64>,
    pub input: DMatrix<f64>,
    pub output: DMatrix<f64>,
    pub scc: SccDecomposition,
    pub balanced: BalancedForm,
}

impl NetworkSystem {
    pub fn new(graph: DiGraph, input: DMatrix<f64>, output: DMatrix<f64>) -> Result<Self> {
        let n = graph.vertex_count();
        Self::with_grounding(
            graph,
            DVector::zeros(n),
            input,
            output,
            &Tolerances::default(),
        )
    }

    pub fn with_grounding(
        graph: DiGraph,
        grounding: DVector<f64>,
        input: DMatrix<f64>,
        output: DMatrix<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        if grounding.len() != n {
            return Err(NetError::DimensionMismatch {
                what: format!(
                    "grounding has length {}, graph has {n} vertices",
                    grounding.len()
                ),
            });
        }
        if let Some(g) = grounding.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(NetError::NotLaplacian {
                reason: format!("grounding entry {g} is negative"),
            });
        }
        if input.nrows() != n {
            return Err(NetError::DimensionMismatch {
                what: format!(
                    "input matrix has {} rows, graph has {n} vertices",
                    input.nrows()
                ),
            });
        }
        if output.ncols() != n {
            return Err(NetError::DimensionMismatch {
                what: format!(
                    "output matrix has {} columns, graph has {n} vertices",
                    output.ncols()
                ),
            });
        }
        let mut laplacian = build_laplacian(&graph);
        for i in 0..n {
            laplacian[(i, i)] += grounding[i];
        }
        let scc = scc_decompose(&graph);
        let balanced = build_balanced_form_grounded(&graph, &scc, &grounding, tol.rank)?;
        Ok(Self {
            graph,
            grounding,
            laplacian,
            input,
            output,
            scc,
            balanced,
        })
    }

    /// Builds a system from a Laplacian-like matrix whose row sums are
    /// nonnegative; any positive row sum becomes grounding.
    pub fn from_matrix(
        l: &DMatrix<f64>,
        input: DMatrix<f64>,
        output: DMatrix<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let (graph, excess) = DiGraph::from_matrix(l)?;
        Self::with_grounding(graph, excess, input, output, tol)
    }

    pub fn n(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_grounded(&self) -> bool {
        self.grounding.iter().any(|&g| g != 0.0)
    }

    /// `-L`.
    pub fn system_matrix(&self) -> DMatrix<f64> {
        -&self.laplacian
    }

    pub fn decompose(&self, tol: &Tolerances) -> Result<SemistableDecomposition> {
        decompose(&self.system_matrix(), tol)
    }

    /// Vertices with a nonzero row in the input matrix.
    pub fn input_vertices(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.input.row(i).iter().any(|&x| x != 0.0))
            .collect()
    }

    /// Vertices with a nonzero column in the output matrix.
    pub fn output_vertices(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.output.column(i).iter().any(|&x| x != 0.0))
            .collect()
    }

    /// Components of the strongly connected decomposition that carry a
    /// consensus mode (leading and ungrounded).
    pub fn consensus_components(&self) -> &[usize] {
        &self.balanced.components
    }
}

/// Input or output matrix selecting the given vertices.
pub fn selector_input(n: usize, vertices: &[usize]) -> DMatrix<f64> {
    let mut f = DMatrix::zeros(n, vertices.len());
    for (k, &v) in vertices.iter().enumerate() {
        f[(v, k)] = 1.0;
    }
    f
}

pub fn selector_output(n: usize, vertices: &[usize]) -> DMatrix<f64> {
    selector_input(n, vertices).transpose()
}
