//! Weighted directed graphs, their Laplacians and strongly connected structure.
//!
//! An edge `source -> target` with weight `w` means that `target` receives
//! information from `source`; it is stored as the adjacency entry
//! `w[target][source]`. The Laplacian is `diag(W 1) - W`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{NetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(source: usize, target: usize, weight: f64) -> Self {
        Self {
            source,
            target,
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiGraph {
    n: usize,
    edges: Vec<Edge>,
    successors: Vec<Vec<(usize, f64)>>,
    predecessors: Vec<Vec<(usize, f64)>>,
}

impl DiGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut list: Vec<Edge> = Vec::new();
        let mut seen = BTreeSet::new();
        for e in edges {
            for v in [e.source, e.target] {
                if v >= n {
                    return Err(NetError::VertexOutOfRange { vertex: v, n });
                }
            }
            if e.source == e.target {
                return Err(NetError::SelfLoop { vertex: e.source });
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(NetError::InvalidWeight {
                    source_vertex: e.source,
                    target: e.target,
                    weight: e.weight,
                });
            }
            if !seen.insert((e.source, e.target)) {
                return Err(NetError::DuplicateEdge {
                    source_vertex: e.source,
                    target: e.target,
                });
            }
            list.push(e);
        }
        list.sort_by_key(|e| (e.source, e.target));
        let mut successors = vec![Vec::new(); n];
        let mut predecessors = vec![Vec::new(); n];
        for e in &list {
            successors[e.source].push((e.target, e.weight));
            predecessors[e.target].push((e.source, e.weight));
        }
        Ok(Self {
            n,
            edges: list,
            successors,
            predecessors,
        })
    }

    /// Reads the graph off the off-diagonal pattern of a Laplacian-like
    /// matrix and returns it with the row-sum excess `l 1`.
    pub fn from_matrix(l: &DMatrix<f64>) -> Result<(Self, DVector<f64>)> {
        let n = l.nrows();
        if l.ncols() != n {
            return Err(NetError::NotLaplacian {
                reason: format!("matrix is {}x{}", n, l.ncols()),
            });
        }
        let scale = l.amax();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = l[(i, j)];
                if !v.is_finite() {
                    return Err(NetError::NotLaplacian {
                        reason: format!("entry ({i},{j}) is not finite"),
                    });
                }
                if i == j || v == 0.0 {
                    continue;
                }
                if v > 0.0 {
                    return Err(NetError::NotLaplacian {
                        reason: format!("off-diagonal entry ({i},{j}) = {v} is positive"),
                    });
                }
                edges.push(Edge::new(j, i, -v));
            }
        }
        let excess = l * DVector::from_element(n, 1.0);
        let g = Self::new(n, edges)?;
        let excess = excess.map(|x| if x.abs() <= 1e-12 * scale { 0.0 } else { x });
        Ok((g, excess))
    }

    /// Inverse of [`build_laplacian`], requiring zero row sums within
    /// `tol * max|l|`.
    pub fn from_laplacian(l: &DMatrix<f64>, tol: f64) -> Result<Self> {
        let (g, excess) = Self::from_matrix(l)?;
        let scale = l.amax();
        if let Some((i, s)) = excess
            .iter()
            .enumerate()
            .find(|(_, s)| s.abs() > tol * scale)
        {
            return Err(NetError::NotLaplacian {
                reason: format!("row {i} sums to {s}"),
            });
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Vertices receiving information from `v`.
    pub fn successors(&self, v: usize) -> &[(usize, f64)] {
        &self.successors[v]
    }

    /// Vertices sending information to `v`.
    pub fn predecessors(&self, v: usize) -> &[(usize, f64)] {
        &self.predecessors[v]
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            w[(e.target, e.source)] = e.weight;
        }
        w
    }

    /// Subgraph induced by `keep`, relabelled in the given order.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut index = vec![usize::MAX; self.n];
        for (k, &v) in keep.iter().enumerate() {
            index[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.source] != usize::MAX && index[e.target] != usize::MAX)
            .map(|e| Edge::new(index[e.source], index[e.target], e.weight));
        Self::new(keep.len(), edges).expect("induced subgraph of a valid graph")
    }

    pub fn is_weakly_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(u, _) in self.successors[v].iter().chain(&self.predecessors[v]) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == self.n
    }
}

pub fn build_laplacian(g: &DiGraph) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.target, e.source)] = -e.weight;
    }
    // Diagonal as the exact negated sum of the off-diagonal row entries,
    // accumulated in column order.
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| l[(i, j)]).sum();
        l[(i, i)] = -off;
    }
    l
}

/// Strongly connected components ordered topologically along the flow of
/// information, ties broken by smallest vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SccDecomposition {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    /// Indices into `components` of the leading components (no incoming
    /// edge from another component), ordered by smallest vertex.
    pub leading: Vec<usize>,
}

impl SccDecomposition {
    pub fn is_leading(&self, component: usize) -> bool {
        self.leading.contains(&component)
    }

    /// Vertices that belong to some leading component.
    pub fn leading_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .leading
            .iter()
            .flat_map(|&c| self.components[c].iter().copied())
            .collect();
        v.sort_unstable();
        v
    }
}

fn tarjan(g: &DiGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succ = g.successors(v);
            if *pos < succ.len() {
                let w = succ[*pos].0;
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
            }
        }
    }
    components
}

pub fn scc_decompose(g: &DiGraph) -> SccDecomposition {
    let n = g.vertex_count();
    let raw = tarjan(g);
    let mut raw_of = vec![0; n];
    for (c, comp) in raw.iter().enumerate() {
        for &v in comp {
            raw_of[v] = c;
        }
    }
    let k = raw.len();
    let mut indeg = vec![0usize; k];
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for e in g.edges() {
        let (a, b) = (raw_of[e.source], raw_of[e.target]);
        if a != b && succ[a].insert(b) {
            indeg[b] += 1;
        }
    }
    let leading_raw: Vec<bool> = indeg.iter().map(|&d| d == 0).collect();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..k)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse((raw[c][0], c)))
        .collect();
    let mut order = Vec::with_capacity(k);
    while let Some(Reverse((_, c))) = heap.pop() {
        order.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                heap.push(Reverse((raw[d][0], d)));
            }
        }
    }
    let components: Vec<Vec<usize>> = order.iter().map(|&c| raw[c].clone()).collect();
    let mut component_of = vec![0; n];
    for (c, comp) in components.iter().enumerate() {
        for &v in comp {
            component_of[v] = c;
        }
    }
    let mut leading: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|(_, &c)| leading_raw[c])
        .map(|(i, _)| i)
        .collect();
    leading.sort_by_key(|&c| components[c][0]);
    SccDecomposition {
        components,
        component_of,
        leading,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectednessClass {
    Strong,
    QuasiStrong,
    Weak,
    Disconnected,
}

impl ConnectednessClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConnectednessClass::Strong => "strong",
            ConnectednessClass::QuasiStrong => "quasi_strong",
            ConnectednessClass::Weak => "weak",
            ConnectednessClass::Disconnected => "disconnected",
        }
    }
}

pub fn connectedness_class(g: &DiGraph, scc: &SccDecomposition) -> ConnectednessClass {
    if !g.is_weakly_connected() {
        ConnectednessClass::Disconnected
    } else if scc.components.len() == 1 {
        ConnectednessClass::Strong
    } else if scc.leading.len() == 1 {
        ConnectednessClass::QuasiStrong
    } else {
        ConnectednessClass::Weak
    }
}

/// Vertex order listing each leading component contiguously, followed by
/// the remaining vertices in topological component order. In this order the
/// permuted Laplacian has no entries coupling a leading block to anything
/// outside it.
pub fn block_triangular_permutation(scc: &SccDecomposition) -> Vec<usize> {
    let mut perm = Vec::new();
    for &c in &scc.leading {
        perm.extend_from_slice(&scc.components[c]);
    }
    for (c, comp) in scc.components.iter().enumerate() {
        if !scc.is_leading(c) {
            perm.extend_from_slice(comp);
        }
    }
    perm
}

/// How a vertex must relate to a set of terminals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    /// Related to at least one terminal.
    #[default]
    Any,
    /// Related to every terminal.
    All,
}

fn closure(g: &DiGraph, start: usize, forward: bool) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let next = if forward {
            g.successors(v)
        } else {
            g.predecessors(v)
        };
        for &(u, _) in next {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    seen
}

fn covered(g: &DiGraph, terminals: &[usize], forward: bool, mode: Coverage) -> Vec<usize> {
    let n = g.vertex_count();
    let mut hits = vec![0usize; n];
    let mut unique = terminals.to_vec();
    unique.sort_unstable();
    unique.dedup();
    for &t in &unique {
        for (v, s) in closure(g, t, forward).into_iter().enumerate() {
            if s {
                hits[v] += 1;
            }
        }
    }
    (0..n)
        .filter(|&v| match mode {
            Coverage::Any => hits[v] > 0,
            Coverage::All => !unique.is_empty() && hits[v] == unique.len(),
        })
        .collect()
}

/// Vertices reached by a directed path from the input vertices (each input
/// vertex reaches itself).
pub fn reachable_set(g: &DiGraph, inputs: &[usize], mode: Coverage) -> Vec<usize> {
    covered(g, inputs, true, mode)
}

/// Vertices with a directed path to the output vertices.
pub fn detectable_set(g: &DiGraph, outputs: &[usize], mode: Coverage) -> Vec<usize> {
    covered(g, outputs, false, mode)
}
