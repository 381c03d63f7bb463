//! Generalized balanced form: a positive diagonal rescaling `M` such that
//! every leading block of `M L` has zero row and column sums.

use nalgebra::{DMatrix, DVector};

use crate::error::{NetError, Result};
use crate::graph::{build_laplacian, DiGraph, SccDecomposition};
use crate::linalg::{rank_threshold, square_svd};

#[derive(Debug, Clone)]
pub struct BalancedForm {
    /// Diagonal of `M`.
    pub weights: DVector<f64>,
    /// `M L`.
    pub laplacian: DMatrix<f64>,
    /// Components of the decomposition that carry a consensus mode.
    pub components: Vec<usize>,
    /// Positive left null vector of each such component block, with
    /// smallest entry equal to one.
    pub left_vectors: Vec<DVector<f64>>,
}

impl BalancedForm {
    pub fn weight_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.weights)
    }

    pub fn inverse_weight_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.weights.map(|w| 1.0 / w))
    }
}

/// Positive left null vector of an irreducible Laplacian block, normalized
/// so that its smallest entry is one.
pub fn frobenius_left_vector(block: &DMatrix<f64>, rank_factor: f64) -> Result<DVector<f64>> {
    let k = block.nrows();
    let fail = |reason: String| NetError::FrobeniusFailure {
        component: 0,
        reason,
    };
    if k == 0 || block.ncols() != k {
        return Err(fail(format!("block is {}x{}", k, block.ncols())));
    }
    if k == 1 {
        return if block[(0, 0)].abs() <= f64::EPSILON {
            Ok(DVector::from_element(1, 1.0))
        } else {
            Err(fail(format!(
                "scalar block {} is not singular",
                block[(0, 0)]
            )))
        };
    }
    let svd = square_svd(&block.transpose())?;
    let tol = rank_threshold(k, svd.s[0], rank_factor);
    if svd.s[k - 1] > tol {
        return Err(fail(format!(
            "block is nonsingular (sigma_min = {:e})",
            svd.s[k - 1]
        )));
    }
    if svd.s[k - 2] <= tol {
        return Err(fail("left null space has dimension above one".into()));
    }
    let mut nu: DVector<f64> = svd.v.column(k - 1).into_owned();
    if nu.sum() < 0.0 {
        nu = -nu;
    }
    let max = nu.max();
    if nu.iter().any(|&x| x <= 1e-12 * max) {
        return Err(fail("left null vector is not strictly positive".into()));
    }
    let min = nu.min();
    Ok(nu / min)
}

pub fn build_balanced_form(g: &DiGraph, scc: &SccDecomposition) -> Result<BalancedForm> {
    build_balanced_form_grounded(g, scc, &DVector::zeros(g.vertex_count()), 10.0)
}

/// Balanced form of `L + diag(grounding)`. Leading components touched by
/// the grounding have no consensus mode and keep unit weight.
pub fn build_balanced_form_grounded(
    g: &DiGraph,
    scc: &SccDecomposition,
    grounding: &DVector<f64>,
    rank_factor: f64,
) -> Result<BalancedForm> {
    let n = g.vertex_count();
    let mut l = build_laplacian(g);
    for i in 0..n {
        l[(i, i)] += grounding[i];
    }
    let mut weights = DVector::from_element(n, 1.0);
    let mut components = Vec::new();
    let mut left_vectors = Vec::new();
    for &c in &scc.leading {
        let verts = &scc.components[c];
        if verts.iter().any(|&v| grounding[v] != 0.0) {
            continue;
        }
        let block = DMatrix::from_fn(verts.len(), verts.len(), |a, b| l[(verts[a], verts[b])]);
        let nu = frobenius_left_vector(&block, rank_factor).map_err(|e| match e {
            NetError::FrobeniusFailure { reason, .. } => NetError::FrobeniusFailure {
                component: c,
                reason,
            },
            other => other,
        })?;
        for (a, &v) in verts.iter().enumerate() {
            weights[v] = nu[a];
        }
        components.push(c);
        left_vectors.push(nu);
    }
    let laplacian = DMatrix::from_diagonal(&weights) * l;
    Ok(BalancedForm {
        weights,
        laplacian,
        components,
        left_vectors,
    })
}

/// Whether every leading block of `l` has zero row and column sums,
/// relative to the largest diagonal entry.
pub fn is_generalized_balanced(l: &DMatrix<f64>, scc: &SccDecomposition) -> bool {
    let scale = (0..l.nrows())
        .map(|i| l[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    scc.leading.iter().all(|&c| {
        let verts = &scc.components[c];
        verts.iter().all(|&i| {
            let row: f64 = verts.iter().map(|&j| l[(i, j)]).sum();
            let col: f64 = verts.iter().map(|&j| l[(j, i)]).sum();
            row.abs() <= 1e-8 * scale && col.abs() <= 1e-8 * scale
        })
    })
}
