//! End-to-end analysis and reduction of a network system.

use crate::error::Result;
use crate::graph::{connectedness_class, ConnectednessClass, Coverage};
use crate::network::NetworkSystem;
use crate::reduction::{
    clusterability_classes, dissimilarity_from_factors, minimal_network_realization, project,
    ClusterClasses, Clustering, Dissimilarity, MinimalRealization, ReducedNetwork,
};
use crate::reduction_error::{ErrorReport, ReferenceModel};
use crate::semistable::{controllability_test, h2_norm, observability_test};
use crate::strategy::{clustering_strategies, error_methods, ClusteringContext};
use crate::tolerances::Tolerances;

/// Structural and spectral summary of a network system.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub connectedness: ConnectednessClass,
    pub components: Vec<Vec<usize>>,
    pub leading: Vec<Vec<usize>>,
    pub consensus_dimension: usize,
    pub classes: ClusterClasses,
    pub controllable: bool,
    pub observable: bool,
    /// `None` when the system is not in H2.
    pub h2_norm: Option<f64>,
    pub weights: Vec<f64>,
    pub grounded: bool,
}

pub fn analyze(sys: &NetworkSystem, tol: &Tolerances) -> Result<Analysis> {
    let dec = sys.decompose(tol)?;
    let classes = clusterability_classes(sys, &dec, tol);
    let h2 = match h2_norm(&dec, &sys.input, &sys.output) {
        Ok(v) => Some(v),
        Err(crate::NetError::NotInH2 { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Analysis {
        connectedness: connectedness_class(&sys.graph, &sys.scc),
        components: sys.scc.components.clone(),
        leading: sys
            .scc
            .leading
            .iter()
            .map(|&c| sys.scc.components[c].clone())
            .collect(),
        consensus_dimension: dec.m,
        classes,
        controllable: controllability_test(&dec, &sys.input)?,
        observable: observability_test(&dec, &sys.output)?,
        h2_norm: h2,
        weights: sys.balanced.weights.iter().copied().collect(),
        grounded: sys.is_grounded(),
    })
}

#[derive(Debug, Clone)]
pub struct ReductionOptions {
    pub order: usize,
    pub strategy: String,
    pub error_method: String,
    pub coverage: Coverage,
    pub minimal_realization: bool,
    pub force: bool,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self {
            order: 1,
            strategy: "dissimilarity".into(),
            error_method: "cross-gramian".into(),
            coverage: Coverage::Any,
            minimal_realization: true,
            force: false,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReductionOutput {
    /// Present when the minimal realization step ran.
    pub minimal: Option<MinimalRealization>,
    /// The model that was clustered (the minimal realization if it ran).
    pub reference: ReferenceModel,
    pub classes: ClusterClasses,
    pub dissimilarity: Dissimilarity,
    pub reduced: ReducedNetwork,
    pub report: ErrorReport,
}

/// Minimal realization, dissimilarity, clustering, projection and error.
/// A supplied clustering refers to the vertices of `sys` and disables the
/// minimal realization step.
pub fn reduce(
    sys: &NetworkSystem,
    opts: &ReductionOptions,
    clustering: Option<Clustering>,
) -> Result<ReductionOutput> {
    let tol = &opts.tolerances;
    let strategies = clustering_strategies();
    let methods = error_methods();
    let strategy = strategies.get(&opts.strategy)?;
    let method = methods.get(&opts.error_method)?;
    let minimal = if opts.minimal_realization && clustering.is_none() {
        Some(minimal_network_realization(sys, opts.coverage, tol)?)
    } else {
        None
    };
    let working = minimal
        .as_ref()
        .map_or_else(|| sys.clone(), |m| m.system.clone());
    let reference = ReferenceModel::new(working, tol)?;
    let classes = clusterability_classes(&reference.system, &reference.dec, tol);
    let dissimilarity = dissimilarity_from_factors(
        &reference.system,
        &reference.p_factor,
        &reference.q_factor,
        &classes,
    );
    let clustering = match clustering {
        Some(c) => c,
        None => {
            let ctx = ClusteringContext {
                system: &reference.system,
                dissimilarity: &dissimilarity,
                tolerances: *tol,
                seed: opts.seed,
            };
            strategy.select(&ctx, opts.order)?
        }
    };
    let reduced = project(&reference.system, &clustering, &classes, opts.force)?;
    let report = method.evaluate(&reference, &reduced)?;
    Ok(ReductionOutput {
        minimal,
        reference,
        classes,
        dissimilarity,
        reduced,
        report,
    })
}
