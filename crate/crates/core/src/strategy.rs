//! Named, runtime-selectable variants of the clustering step and of the
//! error evaluation.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NetError, Result};
use crate::network::NetworkSystem;
use crate::reduction::{
    distance_graph, kruskal_clustering, select_clustering, Clustering, Dissimilarity,
    DissimilarityKind, ReducedNetwork,
};
use crate::reduction_error::{
    h2_error_direct, h2_error_gramian, CrossTermVariant, ErrorReport, ReferenceModel,
};
use crate::tolerances::Tolerances;

/// Everything a clustering strategy may look at.
pub struct ClusteringContext<'a> {
    pub system: &'a NetworkSystem,
    pub dissimilarity: &'a Dissimilarity,
    pub tolerances: Tolerances,
    pub seed: u64,
}

pub trait ClusteringStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// A proper clustering with exactly `order` cells.
    fn select(&self, ctx: &ClusteringContext<'_>, order: usize) -> Result<Clustering>;
}

pub trait ErrorMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn evaluate(&self, reference: &ReferenceModel, reduced: &ReducedNetwork)
        -> Result<ErrorReport>;
}

/// Agglomerates along the distance graph built from a dissimilarity.
pub struct DissimilarityClustering {
    kind: DissimilarityKind,
}

impl DissimilarityClustering {
    pub fn new(kind: DissimilarityKind) -> Self {
        Self { kind }
    }
}

impl ClusteringStrategy for DissimilarityClustering {
    fn name(&self) -> &'static str {
        match self.kind {
            DissimilarityKind::Combined => "dissimilarity",
            DissimilarityKind::Input => "input-dissimilarity",
            DissimilarityKind::Output => "output-dissimilarity",
        }
    }

    fn description(&self) -> &'static str {
        match self.kind {
            DissimilarityKind::Combined => {
                "merge the least dissimilar pairs (input times output dissimilarity)"
            }
            DissimilarityKind::Input => "merge by input dissimilarity only",
            DissimilarityKind::Output => "merge by output dissimilarity only",
        }
    }

    fn select(&self, ctx: &ClusteringContext<'_>, order: usize) -> Result<Clustering> {
        let dg = distance_graph(ctx.dissimilarity, self.kind, &ctx.tolerances)?;
        select_clustering(&dg, order)
    }
}

/// Random spanning-forest merges inside the clusterable classes.
pub struct RandomClustering;

impl ClusteringStrategy for RandomClustering {
    fn name(&self) -> &'static str {
        "random"
    }

    fn description(&self) -> &'static str {
        "random proper clustering drawn from the clusterable classes (seeded)"
    }

    fn select(&self, ctx: &ClusteringContext<'_>, order: usize) -> Result<Clustering> {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let classes = &ctx.dissimilarity.classes;
        let n = classes.class_of.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if classes.clusterable(i, j) {
                    edges.push((rng.gen::<f64>(), i, j));
                }
            }
        }
        kruskal_clustering(n, edges, order)
    }
}

pub struct CrossGramianError {
    pub variant: CrossTermVariant,
}

impl ErrorMethod for CrossGramianError {
    fn name(&self) -> &'static str {
        match self.variant {
            CrossTermVariant::Reduced => "cross-gramian",
            CrossTermVariant::ReducedTransposed => "cross-gramian-transposed",
        }
    }

    fn description(&self) -> &'static str {
        match self.variant {
            CrossTermVariant::Reduced => "trace formula with pseudo and cross Gramians",
            CrossTermVariant::ReducedTransposed => {
                "trace formula with the transposed reduced Laplacian in the cross term (diagnostic)"
            }
        }
    }

    fn evaluate(
        &self,
        reference: &ReferenceModel,
        reduced: &ReducedNetwork,
    ) -> Result<ErrorReport> {
        unbounded_as_report(
            self.name(),
            reference,
            h2_error_gramian(reference, reduced, self.variant),
        )
        .map(|mut r| {
            r.method = self.name().to_string();
            r
        })
    }
}

pub struct DirectError;

impl ErrorMethod for DirectError {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn description(&self) -> &'static str {
        "H2 norm of the stacked error system from a square-root Gramian factor"
    }

    fn evaluate(
        &self,
        reference: &ReferenceModel,
        reduced: &ReducedNetwork,
    ) -> Result<ErrorReport> {
        unbounded_as_report(self.name(), reference, h2_error_direct(reference, reduced))
    }
}

fn unbounded_as_report(
    name: &str,
    reference: &ReferenceModel,
    res: Result<ErrorReport>,
) -> Result<ErrorReport> {
    match res {
        Err(NetError::UnboundedError { mismatch }) => Ok(ErrorReport::unbounded(
            name,
            mismatch,
            &reference.tolerances,
        )),
        other => other,
    }
}

/// Name-keyed collection of trait objects.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<Box<T>>,
    names: Vec<&'static str>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
            names: Vec::new(),
        }
    }

    /// Adds an entry, replacing any entry with the same name.
    pub fn register(&mut self, name: &'static str, entry: Box<T>) {
        if let Some(pos) = self.names.iter().position(|&n| n == name) {
            self.entries[pos] = entry;
        } else {
            self.names.push(name);
            self.entries.push(entry);
        }
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.names
            .iter()
            .position(|&n| n == name)
            .map(|pos| self.entries[pos].as_ref())
            .ok_or_else(|| NetError::UnknownStrategy {
                kind: self.kind.to_string(),
                name: name.to_string(),
                available: self.names.join(", "),
            })
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }
}

pub fn clustering_strategies() -> Registry<dyn ClusteringStrategy> {
    let mut reg: Registry<dyn ClusteringStrategy> = Registry::new("clustering strategy");
    for s in [
        Box::new(DissimilarityClustering::new(DissimilarityKind::Combined))
            as Box<dyn ClusteringStrategy>,
        Box::new(DissimilarityClustering::new(DissimilarityKind::Input)),
        Box::new(DissimilarityClustering::new(DissimilarityKind::Output)),
        Box::new(RandomClustering),
    ] {
        reg.register(s.name(), s);
    }
    reg
}

pub fn error_methods() -> Registry<dyn ErrorMethod> {
    let mut reg: Registry<dyn ErrorMethod> = Registry::new("error method");
    for m in [
        Box::new(CrossGramianError {
            variant: CrossTermVariant::Reduced,
        }) as Box<dyn ErrorMethod>,
        Box::new(CrossGramianError {
            variant: CrossTermVariant::ReducedTransposed,
        }),
        Box::new(DirectError),
    ] {
        reg.register(m.name(), m);
    }
    reg
}

/// Matrix of the combined dissimilarity with `inf` for pairs that are not
/// clusterable and zero on the diagonal.
pub fn combined_dissimilarity(d: &Dissimilarity) -> DMatrix<f64> {
    let n = d.n();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            d.value(i, j).unwrap_or(f64::INFINITY)
        }
    })
}
