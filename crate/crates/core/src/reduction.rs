//! Clusterability, vertex dissimilarity, minimal network realizations,
//! cluster selection and projection onto a clustering.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{NetError, Result};
use crate::graph::{build_laplacian, detectable_set, reachable_set, Coverage};
use crate::linalg::ComplexFactor;
use crate::network::NetworkSystem;
use crate::semistable::{controllability_factor, observability_factor, SemistableDecomposition};
use crate::tolerances::Tolerances;

/// A partition of the vertex set into cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clustering {
    cells: Vec<Vec<usize>>,
    #[serde(skip)]
    assignment: Vec<usize>,
}

impl Clustering {
    /// Validates that `cells` partition `0..n`; cell order is kept and each
    /// cell is sorted.
    pub fn from_cells(n: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let invalid = |reason: String| NetError::InvalidClustering { reason };
        let mut assignment = vec![usize::MAX; n];
        let mut sorted = Vec::with_capacity(cells.len());
        for (c, mut cell) in cells.into_iter().enumerate() {
            if cell.is_empty() {
                return Err(invalid(format!("cell {c} is empty")));
            }
            cell.sort_unstable();
            for &v in &cell {
                if v >= n {
                    return Err(invalid(format!("vertex {v} is out of range")));
                }
                if assignment[v] != usize::MAX {
                    return Err(invalid(format!("vertex {v} appears twice")));
                }
                assignment[v] = c;
            }
            sorted.push(cell);
        }
        if let Some(v) = assignment.iter().position(|&a| a == usize::MAX) {
            return Err(invalid(format!("vertex {v} is not covered")));
        }
        Ok(Self {
            cells: sorted,
            assignment,
        })
    }

    /// Cells from arbitrary labels, ordered by smallest member.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(v);
        }
        let mut cells: Vec<Vec<usize>> = groups.into_values().collect();
        cells.sort_by_key(|c| c[0]);
        Self::from_cells(labels.len(), cells).expect("labels define a partition")
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_cells(n, (0..n).map(|v| vec![v]).collect()).expect("singletons")
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn order(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    /// Binary characteristic matrix `Pi` with `Pi[v][cell_of(v)] = 1`.
    pub fn characteristic_matrix(&self) -> DMatrix<f64> {
        let mut pi = DMatrix::zeros(self.n(), self.order());
        for (v, &c) in self.assignment.iter().enumerate() {
            pi[(v, c)] = 1.0;
        }
        pi
    }
}

/// Equivalence classes of the clusterability relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterClasses {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl ClusterClasses {
    pub fn clusterable(&self, i: usize, j: usize) -> bool {
        self.class_of[i] == self.class_of[j]
    }

    /// Number of maximal clusterable cells, the smallest attainable order of
    /// a proper clustering.
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

/// Two vertices are clusterable when they lie in the same consensus
/// component, or when both lie outside every consensus component and
/// converge to the same consensus value.
pub fn clusterability_classes(
    sys: &NetworkSystem,
    dec: &SemistableDecomposition,
    tol: &Tolerances,
) -> ClusterClasses {
    let n = sys.n();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &c in sys.consensus_components() {
        let id = classes.len();
        for &v in &sys.scc.components[c] {
            class_of[v] = id;
        }
        classes.push(sys.scc.components[c].clone());
    }
    let scale = row_scale(&dec.u);
    let mut representatives: Vec<(usize, usize)> = Vec::new();
    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        let found = representatives.iter().find(|&&(rep, _)| {
            row_distance(&dec.u, v, rep, 1.0, 1.0) <= tol.clusterability * scale
        });
        match found {
            Some(&(_, id)) => {
                class_of[v] = id;
                classes[id].push(v);
            }
            None => {
                let id = classes.len();
                class_of[v] = id;
                classes.push(vec![v]);
                representatives.push((v, id));
            }
        }
    }
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by_key(|&c| classes[c][0]);
    let mut rank = vec![0; classes.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let classes = order.iter().map(|&c| classes[c].clone()).collect();
    let class_of = class_of.iter().map(|&c| rank[c]).collect();
    ClusterClasses { class_of, classes }
}

fn row_scale(a: &DMatrix<f64>) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
}

fn row_distance(a: &DMatrix<f64>, i: usize, j: usize, si: f64, sj: f64) -> f64 {
    (0..a.ncols())
        .map(|k| (a[(i, k)] / si - a[(j, k)] / sj).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Clusterability checked directly on the null-space bases:
/// `e_ij^T u = 0` and `e_ij^T M^-1 v = 0`.
pub fn clusterable_numeric(
    sys: &NetworkSystem,
    dec: &SemistableDecomposition,
    i: usize,
    j: usize,
    tol: &Tolerances,
) -> bool {
    let w = &sys.balanced.weights;
    let mv = DMatrix::from_fn(dec.v.nrows(), dec.v.ncols(), |r, c| dec.v[(r, c)] / w[r]);
    row_distance(&dec.u, i, j, 1.0, 1.0) <= tol.clusterability * row_scale(&dec.u)
        && row_distance(&mv, i, j, 1.0, 1.0) <= tol.clusterability * row_scale(&mv)
}

/// Pairwise input and output dissimilarity. Entries for pairs that are not
/// clusterable are computed but reported as infinite by the accessors.
#[derive(Debug, Clone)]
pub struct Dissimilarity {
    pub input: DMatrix<f64>,
    pub output: DMatrix<f64>,
    pub classes: ClusterClasses,
}

impl Dissimilarity {
    pub fn n(&self) -> usize {
        self.input.nrows()
    }

    /// Combined dissimilarity, `None` for pairs that are not clusterable.
    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        self.classes
            .clusterable(i, j)
            .then(|| self.input[(i, j)] * self.output[(i, j)])
    }

    pub fn input_value(&self, i: usize, j: usize) -> Option<f64> {
        self.classes.clusterable(i, j).then(|| self.input[(i, j)])
    }

    pub fn output_value(&self, i: usize, j: usize) -> Option<f64> {
        self.classes.clusterable(i, j).then(|| self.output[(i, j)])
    }
}

fn pairwise_row_distances(g: &ComplexFactor, scale: &[f64]) -> DMatrix<f64> {
    let n = g.nrows();
    let k = g.re.ncols();
    let mut d = DMatrix::zeros(n, n);
    let re = g.re.transpose();
    let im = g.im.transpose();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut acc = 0.0;
            for c in 0..k {
                let a = re[(c, i)] / scale[i] - re[(c, j)] / scale[j];
                let b = im[(c, i)] / scale[i] - im[(c, j)] / scale[j];
                acc += a * a + b * b;
            }
            let v = acc.sqrt();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// Input dissimilarity `sqrt(e_ij^T P e_ij)` with `P` the pseudo
/// controllability Gramian of `(-L, F)`; output dissimilarity
/// `sqrt(e_ij^T M^-1 Q M^-1 e_ij)` with `Q` that of `(H, -L)`.
pub fn dissimilarity_matrix(
    sys: &NetworkSystem,
    dec: &SemistableDecomposition,
    classes: &ClusterClasses,
) -> Result<Dissimilarity> {
    let pf = controllability_factor(dec, &sys.input)?;
    let qf = observability_factor(dec, &sys.output)?;
    Ok(dissimilarity_from_factors(sys, &pf, &qf, classes))
}

pub fn dissimilarity_from_factors(
    sys: &NetworkSystem,
    p_factor: &ComplexFactor,
    q_factor: &ComplexFactor,
    classes: &ClusterClasses,
) -> Dissimilarity {
    let ones = vec![1.0; sys.n()];
    let weights: Vec<f64> = sys.balanced.weights.iter().copied().collect();
    Dissimilarity {
        input: pairwise_row_distances(p_factor, &ones),
        output: pairwise_row_distances(q_factor, &weights),
        classes: classes.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// Equal rows of the input matrix and of the Laplacian up to a shift.
    Input,
    /// Equal weighted columns of the output matrix and of the Laplacian up
    /// to a shift.
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroDissimilarPair {
    pub i: usize,
    pub j: usize,
    pub beta: f64,
    pub kind: ZeroKind,
}

fn shifted_difference(l: &DMatrix<f64>, i: usize, j: usize, rows: bool) -> (f64, f64) {
    let at = |a: usize, b: usize| if rows { l[(a, b)] } else { l[(b, a)] };
    let beta = 0.5 * ((at(i, i) - at(j, i)) - (at(i, j) - at(j, j)));
    let mut acc = 0.0;
    for k in 0..l.nrows() {
        let mut d = at(i, k) - at(j, k);
        if k == i {
            d -= beta;
        } else if k == j {
            d += beta;
        }
        acc += d * d;
    }
    (beta, acc.sqrt())
}

/// Clusterable pairs satisfying the algebraic 0-dissimilarity conditions
/// `e_ij^T [F, L - beta I] = 0` or `[H M^-1; L - beta I] e_ij = 0`.
pub fn zero_dissimilar_pairs(
    sys: &NetworkSystem,
    classes: &ClusterClasses,
    tol: &Tolerances,
) -> Vec<ZeroDissimilarPair> {
    let n = sys.n();
    let l = &sys.laplacian;
    let lscale = l.amax().max(f64::MIN_POSITIVE);
    let fscale = sys.input.amax().max(f64::MIN_POSITIVE);
    let w = &sys.balanced.weights;
    let hw = DMatrix::from_fn(sys.output.nrows(), n, |r, c| sys.output[(r, c)] / w[c]);
    let hscale = hw.amax().max(f64::MIN_POSITIVE);
    let thr = tol.zero_dissimilarity;
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if !classes.clusterable(i, j) {
                continue;
            }
            let frow = (sys.input.row(i) - sys.input.row(j)).norm();
            if frow <= thr * fscale {
                let (beta, res) = shifted_difference(l, i, j, true);
                if res <= thr * lscale {
                    out.push(ZeroDissimilarPair {
                        i,
                        j,
                        beta,
                        kind: ZeroKind::Input,
                    });
                    continue;
                }
            }
            let hcol = (hw.column(i) - hw.column(j)).norm();
            if hcol <= thr * hscale {
                let (beta, res) = shifted_difference(l, i, j, false);
                if res <= thr * lscale {
                    out.push(ZeroDissimilarPair {
                        i,
                        j,
                        beta,
                        kind: ZeroKind::Output,
                    });
                }
            }
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            components: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        self.components -= 1;
        true
    }

    fn labels(&mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|v| self.find(v)).collect()
    }
}

/// Aggregation matrices `Pi` and `Pi^+ = (Pi^T M Pi)^-1 Pi^T M`.
pub fn projection_matrices(
    sys: &NetworkSystem,
    clustering: &Clustering,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let pi = clustering.characteristic_matrix();
    let w = &sys.balanced.weights;
    let mut pinv = DMatrix::zeros(clustering.order(), clustering.n());
    for (c, cell) in clustering.cells().iter().enumerate() {
        let total: f64 = cell.iter().map(|&v| w[v]).sum();
        for &v in cell {
            pinv[(c, v)] = w[v] / total;
        }
    }
    (pi, pinv)
}

/// The reduced network `(Pi^+ L Pi, Pi^+ F, H Pi)`.
#[derive(Debug, Clone)]
pub struct ReducedNetwork {
    pub clustering: Clustering,
    pub laplacian: DMatrix<f64>,
    pub input: DMatrix<f64>,
    pub output: DMatrix<f64>,
    pub pi: DMatrix<f64>,
    pub pi_pinv: DMatrix<f64>,
    pub proper: bool,
    pub warning: Option<String>,
}

impl ReducedNetwork {
    pub fn order(&self) -> usize {
        self.clustering.order()
    }

    /// The reduced model as a network system in its own right.
    pub fn to_system(&self, tol: &Tolerances) -> Result<NetworkSystem> {
        NetworkSystem::from_matrix(
            &self.laplacian,
            self.input.clone(),
            self.output.clone(),
            tol,
        )
    }
}

/// First pair of non-clusterable vertices sharing a cell.
pub fn improper_pair(clustering: &Clustering, classes: &ClusterClasses) -> Option<(usize, usize)> {
    for cell in clustering.cells() {
        for &v in &cell[1..] {
            if !classes.clusterable(cell[0], v) {
                return Some((cell[0], v));
            }
        }
    }
    None
}

pub fn project(
    sys: &NetworkSystem,
    clustering: &Clustering,
    classes: &ClusterClasses,
    force: bool,
) -> Result<ReducedNetwork> {
    if clustering.n() != sys.n() {
        return Err(NetError::InvalidClustering {
            reason: format!(
                "clustering covers {} vertices, network has {}",
                clustering.n(),
                sys.n()
            ),
        });
    }
    let bad = improper_pair(clustering, classes);
    if let (Some((i, j)), false) = (bad, force) {
        return Err(NetError::ImproperClustering { i, j });
    }
    let mut reduced = project_unchecked(sys, clustering);
    if let Some((i, j)) = bad {
        reduced.proper = false;
        reduced.warning = Some(format!(
            "vertices {i} and {j} share a cell without being clusterable; the reduction error is unbounded"
        ));
    }
    Ok(reduced)
}

fn project_unchecked(sys: &NetworkSystem, clustering: &Clustering) -> ReducedNetwork {
    let (pi, pi_pinv) = projection_matrices(sys, clustering);
    let mut laplacian = &pi_pinv * &sys.laplacian * &pi;
    let r = clustering.order();
    for a in 0..r {
        for b in 0..r {
            if a != b && laplacian[(a, b)] > 0.0 {
                laplacian[(a, b)] = 0.0;
            }
        }
    }
    let grounding = &pi_pinv * &sys.grounding;
    for a in 0..r {
        let off: f64 = (0..r).filter(|&b| b != a).map(|b| laplacian[(a, b)]).sum();
        laplacian[(a, a)] = grounding[a] - off;
    }
    ReducedNetwork {
        clustering: clustering.clone(),
        input: &pi_pinv * &sys.input,
        output: &sys.output * &pi,
        laplacian,
        pi,
        pi_pinv,
        proper: true,
        warning: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeRecord {
    /// Groups of original vertices merged into one vertex.
    pub groups: Vec<Vec<usize>>,
    pub kind: ZeroKind,
    /// The merged pairs with their shifts, labelled by the smallest
    /// original vertex each side represents.
    pub pairs: Vec<ZeroDissimilarPair>,
}

#[derive(Debug, Clone)]
pub struct MinimalRealization {
    pub system: NetworkSystem,
    pub removed_unreachable: Vec<usize>,
    pub removed_undetectable: Vec<usize>,
    pub merges: Vec<MergeRecord>,
    /// Original vertices represented by each vertex of the result.
    pub members: Vec<Vec<usize>>,
}

impl MinimalRealization {
    pub fn changed(&self) -> bool {
        !(self.removed_unreachable.is_empty()
            && self.removed_undetectable.is_empty()
            && self.merges.is_empty())
    }

    /// Vertex of the result representing each original vertex.
    pub fn vertex_map(&self, original_n: usize) -> Vec<Option<usize>> {
        let mut map = vec![None; original_n];
        for (k, group) in self.members.iter().enumerate() {
            for &v in group {
                map[v] = Some(k);
            }
        }
        map
    }
}

/// Removes vertices that are unreachable from the inputs or cannot reach an
/// output, then repeatedly merges 0-dissimilar pairs. Removal keeps the
/// principal submatrix of the Laplacian, so influence from removed vertices
/// survives as grounding.
pub fn minimal_network_realization(
    sys: &NetworkSystem,
    coverage: Coverage,
    tol: &Tolerances,
) -> Result<MinimalRealization> {
    let n = sys.n();
    let reach = reachable_set(&sys.graph, &sys.input_vertices(), coverage);
    let detect = detectable_set(&sys.graph, &sys.output_vertices(), coverage);
    let mut in_reach = vec![false; n];
    for &v in &reach {
        in_reach[v] = true;
    }
    let mut in_detect = vec![false; n];
    for &v in &detect {
        in_detect[v] = true;
    }
    let removed_unreachable: Vec<usize> = (0..n).filter(|&v| !in_reach[v]).collect();
    let removed_undetectable: Vec<usize> =
        (0..n).filter(|&v| in_reach[v] && !in_detect[v]).collect();
    let keep: Vec<usize> = (0..n).filter(|&v| in_reach[v] && in_detect[v]).collect();
    if keep.is_empty() {
        return Err(NetError::DegenerateNetwork);
    }
    let mut current = if keep.len() == n {
        sys.clone()
    } else {
        let l = DMatrix::from_fn(keep.len(), keep.len(), |a, b| {
            sys.laplacian[(keep[a], keep[b])]
        });
        let f = DMatrix::from_fn(keep.len(), sys.input.ncols(), |a, c| {
            sys.input[(keep[a], c)]
        });
        let h = DMatrix::from_fn(sys.output.nrows(), keep.len(), |r, b| {
            sys.output[(r, keep[b])]
        });
        NetworkSystem::from_matrix(&l, f, h, tol)?
    };
    let mut members: Vec<Vec<usize>> = keep.iter().map(|&v| vec![v]).collect();
    let mut merges = Vec::new();
    loop {
        let dec = current.decompose(tol)?;
        let classes = clusterability_classes(&current, &dec, tol);
        let pairs = zero_dissimilar_pairs(&current, &classes, tol);
        let Some(first) = pairs.first() else { break };
        let kind = if pairs.iter().any(|p| p.kind == ZeroKind::Input) {
            ZeroKind::Input
        } else {
            first.kind
        };
        let mut uf = UnionFind::new(current.n());
        for p in pairs.iter().filter(|p| p.kind == kind) {
            uf.union(p.i, p.j);
        }
        let clustering = Clustering::from_labels(&uf.labels());
        let groups: Vec<Vec<usize>> = clustering
            .cells()
            .iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let mut g: Vec<usize> =
                    c.iter().flat_map(|&v| members[v].iter().copied()).collect();
                g.sort_unstable();
                g
            })
            .collect();
        let merged_pairs = pairs
            .iter()
            .filter(|p| p.kind == kind)
            .map(|p| ZeroDissimilarPair {
                i: members[p.i][0],
                j: members[p.j][0],
                ..*p
            })
            .collect();
        merges.push(MergeRecord {
            groups,
            kind,
            pairs: merged_pairs,
        });
        members = clustering
            .cells()
            .iter()
            .map(|c| {
                let mut g: Vec<usize> =
                    c.iter().flat_map(|&v| members[v].iter().copied()).collect();
                g.sort_unstable();
                g
            })
            .collect();
        current = project_unchecked(&current, &clustering).to_system(tol)?;
    }
    Ok(MinimalRealization {
        system: current,
        removed_unreachable,
        removed_undetectable,
        merges,
        members,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DissimilarityKind {
    Combined,
    Input,
    Output,
}

/// Undirected graph with weights `1 / D_ij` on clusterable pairs.
#[derive(Debug, Clone)]
pub struct DistanceGraph {
    pub weights: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
}

pub fn distance_graph(
    d: &Dissimilarity,
    kind: DissimilarityKind,
    tol: &Tolerances,
) -> Result<DistanceGraph> {
    let n = d.n();
    let in_scale = d.input.amax();
    let out_scale = d.output.amax();
    let zero_in = |i: usize, j: usize| d.input[(i, j)] <= tol.zero_dissimilarity * in_scale;
    let zero_out = |i: usize, j: usize| d.output[(i, j)] <= tol.zero_dissimilarity * out_scale;
    let mut x = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if !d.classes.clusterable(i, j) {
                continue;
            }
            let (zero, value) = match kind {
                DissimilarityKind::Combined => (
                    zero_in(i, j) || zero_out(i, j),
                    d.input[(i, j)] * d.output[(i, j)],
                ),
                DissimilarityKind::Input => (zero_in(i, j), d.input[(i, j)]),
                DissimilarityKind::Output => (zero_out(i, j), d.output[(i, j)]),
            };
            if zero || value <= 0.0 {
                return Err(NetError::ZeroDissimilarityPresent { i, j });
            }
            x[(i, j)] = 1.0 / value;
            x[(j, i)] = 1.0 / value;
        }
    }
    let laplacian = DMatrix::from_diagonal(&x.column_sum()) - &x;
    Ok(DistanceGraph {
        weights: x,
        laplacian,
    })
}

/// Merges along the heaviest edges first (ties: lexicographically smallest
/// pair) until `r` cells remain.
pub fn kruskal_clustering(
    n: usize,
    mut edges: Vec<(f64, usize, usize)>,
    r: usize,
) -> Result<Clustering> {
    if r > n {
        return Err(NetError::OrderTooLarge { requested: r, n });
    }
    let mut probe = UnionFind::new(n);
    for &(_, i, j) in &edges {
        probe.union(i, j);
    }
    if r < probe.components {
        return Err(NetError::OrderTooSmall {
            requested: r,
            minimum: probe.components,
        });
    }
    edges.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a.1, a.2).cmp(&(b.1, b.2)))
    });
    let mut uf = UnionFind::new(n);
    for &(_, i, j) in &edges {
        if uf.components == r {
            break;
        }
        uf.union(i, j);
    }
    Ok(Clustering::from_labels(&uf.labels()))
}

pub fn select_clustering(dg: &DistanceGraph, r: usize) -> Result<Clustering> {
    let n = dg.weights.nrows();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = dg.weights[(i, j)];
            if w > 0.0 {
                edges.push((w, i, j));
            }
        }
    }
    kruskal_clustering(n, edges, r)
}

/// Laplacian of the unweighted graph linking every clusterable pair.
pub fn clusterability_laplacian(classes: &ClusterClasses) -> DMatrix<f64> {
    let n = classes.class_of.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && classes.clusterable(i, j) {
                edges.push(crate::graph::Edge::new(j, i, 1.0));
            }
        }
    }
    build_laplacian(&crate::graph::DiGraph::new(n, edges).expect("valid clusterability graph"))
}
