//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use nalgebra::{Complex, DMatrix};
use netred::graph::{DiGraph, Edge};
use netred::network::NetworkSystem;
use netred::reduction::{
    clusterability_classes, dissimilarity_from_factors, project, ReducedNetwork,
};
use netred::reduction_error::ReferenceModel;
use netred::Tolerances;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The six-vertex example graph (0-based): leading components {0,1,2} and
/// {4,5}, follower 3.
pub fn example_edges() -> Vec<Edge> {
    vec![
        Edge::new(2, 0, 1.0),
        Edge::new(0, 1, 2.0),
        Edge::new(1, 2, 2.0),
        Edge::new(1, 3, 1.0),
        Edge::new(5, 3, 1.0),
        Edge::new(5, 4, 3.0),
        Edge::new(4, 5, 1.0),
    ]
}

pub fn example_graph() -> DiGraph {
    DiGraph::new(6, example_edges()).unwrap()
}

pub fn example_laplacian() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        6,
        6,
        &[
            1., 0., -1., 0., 0., 0., //
            -2., 2., 0., 0., 0., 0., //
            0., -2., 2., 0., 0., 0., //
            0., -1., 0., 2., 0., -1., //
            0., 0., 0., 0., 3., -3., //
            0., 0., 0., 0., -1., 1.,
        ],
    )
}

pub fn example_system() -> NetworkSystem {
    NetworkSystem::new(
        example_graph(),
        DMatrix::identity(6, 6),
        DMatrix::identity(6, 6),
    )
    .unwrap()
}

fn weight(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.5..2.0)
}

/// Directed graph with each ordered pair present independently.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DiGraph {
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.gen_bool(p) {
                edges.push(Edge::new(s, t, weight(rng)));
            }
        }
    }
    DiGraph::new(n, edges).unwrap()
}

/// Random digraph made weakly connected by a randomly oriented spanning tree.
pub fn random_weak_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DiGraph {
    let mut present = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for k in 1..n {
        let a = order[k];
        let b = order[rng.gen_range(0..k)];
        let (s, t) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        present[s][t] = true;
        edges.push(Edge::new(s, t, weight(rng)));
    }
    for s in 0..n {
        for t in 0..n {
            if s != t && !present[s][t] && rng.gen_bool(p) {
                present[s][t] = true;
                edges.push(Edge::new(s, t, weight(rng)));
            }
        }
    }
    DiGraph::new(n, edges).unwrap()
}

/// Ring plus random chords on the vertices `offset..offset + size`.
pub fn strong_block_edges(
    rng: &mut ChaCha8Rng,
    offset: usize,
    size: usize,
    chords: usize,
) -> Vec<Edge> {
    let mut present = std::collections::BTreeSet::new();
    let mut edges = Vec::new();
    if size < 2 {
        return edges;
    }
    for k in 0..size {
        let (s, t) = (offset + k, offset + (k + 1) % size);
        if present.insert((s, t)) {
            edges.push(Edge::new(s, t, weight(rng)));
        }
    }
    for _ in 0..chords {
        let s = offset + rng.gen_range(0..size);
        let t = offset + rng.gen_range(0..size);
        if s != t && present.insert((s, t)) {
            edges.push(Edge::new(s, t, weight(rng)));
        }
    }
    edges
}

pub fn random_strong_digraph(rng: &mut ChaCha8Rng, n: usize) -> DiGraph {
    let chords = rng.gen_range(0..=2 * n);
    DiGraph::new(n, strong_block_edges(rng, 0, n, chords)).unwrap()
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    g.qr().q()
}

/// `S diag(0_m, A_s) S^-1` with a well conditioned `S` and a random Hurwitz
/// block `A_s` whose eigenvalues have real parts in `[-3, -0.3]`.
pub fn random_semistable(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DMatrix<f64> {
    let k = n - m;
    let mut blk = DMatrix::zeros(n, n);
    if k > 0 {
        let q = random_orthogonal(rng, k);
        let mut t = DMatrix::zeros(k, k);
        let mut i = 0;
        while i < k {
            let re = -rng.gen_range(0.3..3.0);
            if i + 1 < k && rng.gen_bool(0.4) {
                let im = rng.gen_range(0.2..2.0);
                t[(i, i)] = re;
                t[(i + 1, i + 1)] = re;
                t[(i, i + 1)] = im;
                t[(i + 1, i)] = -im;
                i += 2;
            } else {
                t[(i, i)] = re;
                i += 1;
            }
        }
        for r in 0..k {
            for c in (r + 1)..k {
                if t[(r, c)] == 0.0 && !(c == r + 1 && t[(c, r)] != 0.0) {
                    t[(r, c)] = rng.gen_range(-0.5..0.5);
                }
            }
        }
        blk.view_mut((m, m), (k, k))
            .copy_from(&(&q * t * q.transpose()));
    }
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let sig = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        rng.gen_range(1.0..3.0)
    }));
    let s = &q1 * &sig * &q2;
    let s_inv = q2.transpose() * sig.try_inverse().unwrap() * q1.transpose();
    s * blk * s_inv
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0))
}

/// Transitive closure along information flow: `reach[s][t]` when a
/// directed path leads from `s` to `t` (every vertex reaches itself).
pub fn flow_closure(g: &DiGraph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut reach = vec![vec![false; n]; n];
    for (v, row) in reach.iter_mut().enumerate() {
        row[v] = true;
    }
    for e in g.edges() {
        reach[e.source][e.target] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Breadth-first search over an explicit edge list.
pub fn bfs(n: usize, edges: &[(usize, usize)], sources: &[usize]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(s, t) in edges {
        adj[s].push(t);
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &t in &adj[v] {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    (0..n).filter(|&v| seen[v]).collect()
}

pub fn flow_pairs(g: &DiGraph) -> Vec<(usize, usize)> {
    g.edges().iter().map(|e| (e.source, e.target)).collect()
}

pub fn transposed(g: &DiGraph) -> DiGraph {
    DiGraph::new(
        g.vertex_count(),
        g.edges()
            .iter()
            .map(|e| Edge::new(e.target, e.source, e.weight)),
    )
    .unwrap()
}

/// Limit projector `lim exp(a t)` taken from the exponential itself.
pub fn limit_projector(a: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let mut t = 1.0;
    loop {
        let e1 = (a * t).exp();
        let e2 = (a * (2.0 * t)).exp();
        if (&e2 - &e1).norm() <= 1e-13 * e1.norm().max(1.0) || t > 1e4 {
            return (e2, 2.0 * t);
        }
        t *= 2.0;
    }
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre rule on `[0, horizon]` applied to
/// `f(exp(a t))`.
pub fn quadrature<F>(a: &DMatrix<f64>, horizon: f64, panels: usize, mut f: F) -> DMatrix<f64>
where
    F: FnMut(&DMatrix<f64>) -> DMatrix<f64>,
{
    let h = horizon / panels as f64;
    let step = (a * h).exp();
    let offsets: Vec<DMatrix<f64>> = GL_NODES
        .iter()
        .map(|x| (a * (0.5 * h * (x + 1.0))).exp())
        .collect();
    let mut base = DMatrix::identity(a.nrows(), a.ncols());
    let mut acc: Option<DMatrix<f64>> = None;
    for _ in 0..panels {
        for (off, w) in offsets.iter().zip(GL_WEIGHTS) {
            let val = f(&(&base * off)) * (0.5 * h * w);
            acc = Some(match acc {
                Some(s) => s + val,
                None => val,
            });
        }
        base = &base * &step;
    }
    acc.unwrap()
}

/// Horizon after which `|exp(a t) - J|` stays below `eps`.
pub fn settling_horizon(a: &DMatrix<f64>, j: &DMatrix<f64>, eps: f64) -> f64 {
    let mut t = 1.0;
    let mut prev = f64::INFINITY;
    loop {
        let gap = ((a * t).exp() - j).norm();
        // The exponential has an accuracy floor; stop once the transient
        // has stalled at that level.
        if gap <= eps || (gap <= 1e-8 && gap > 0.5 * prev) {
            return t;
        }
        prev = gap;
        t *= 1.5;
        assert!(t < 1e5, "no settling horizon");
    }
}

/// Pseudo controllability Gramian `int (e^{at} - J) b b^T (e^{at} - J)^T dt`
/// by quadrature.
pub fn quadrature_gramian(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (j, _) = limit_projector(a);
    let horizon = settling_horizon(a, &j, 1e-12);
    let panels = (horizon * 4.0 * a.norm().max(1.0)).ceil() as usize;
    quadrature(a, horizon, panels.max(16), |e| {
        let x = (e - &j) * b;
        &x * x.transpose()
    })
}

/// Minimum-norm least-squares solution of `a p + p a^T + (I-J) b b^T (I-J)^T = 0`
/// through the Kronecker form, followed by `p - J p J^T`.
pub fn kronecker_gramian(a: &DMatrix<f64>, b: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let op = eye.kronecker(a) + a.kronecker(&eye);
    let pb = (&eye - j) * b;
    let rhs = -(&pb * pb.transpose());
    let vec_rhs = DMatrix::from_column_slice(n * n, 1, rhs.as_slice());
    let sol = netred::linalg::pseudo_inverse(&op, 1e4) * vec_rhs;
    let p = DMatrix::from_column_slice(n, n, sol.as_slice());
    let p = &p - j * &p * j.transpose();
    (&p + p.transpose()) * 0.5
}

/// Whether a complex `n x k` matrix has full row rank `n`, decided on the
/// eigenvalues of the real symmetric Gram matrix of its real embedding.
fn full_row_rank(m: &DMatrix<Complex<f64>>) -> bool {
    let (n, k) = m.shape();
    let real = DMatrix::from_fn(2 * n, 2 * k, |i, j| {
        let z = m[(i % n, j % k)];
        match (i < n, j < k) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let gram = &real * real.transpose();
    let eig = gram.symmetric_eigenvalues();
    let max = eig.max();
    eig.min() > 1e-12 * max
}

/// Eigenvalues from an iteration-capped real Schur form (nalgebra's
/// uncapped variant can stall on exactly singular input). Stalled
/// iterations are retried on random orthogonal similarity transforms.
pub fn eigenvalues(a: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let n = a.nrows();
    if a.amax() == 0.0 {
        return vec![Complex::new(0.0, 0.0); n];
    }
    let mut r = rng(0xe16e);
    let mut candidates = vec![a.clone(), a.transpose()];
    for _ in 0..8 {
        let q = random_orthogonal(&mut r, n);
        candidates.push(&q * a * q.transpose());
    }
    candidates
        .into_iter()
        .flat_map(|m| [(m.clone(), 5.0 * f64::EPSILON), (m, 1e-14)])
        .find_map(|(m, eps)| nalgebra::Schur::try_new(m, eps, 1000 * n.max(10)))
        .expect("Schur iteration converged")
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Popov-Belevitch-Hautus test at every eigenvalue of `a`.
pub fn pbh_controllable(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    let eig = eigenvalues(a);
    eig.iter().all(|&lam| {
        let mut m = DMatrix::<Complex<f64>>::zeros(n, n + b.ncols());
        for i in 0..n {
            for k in 0..n {
                let d = if i == k { lam } else { Complex::new(0.0, 0.0) };
                m[(i, k)] = d - Complex::new(a[(i, k)], 0.0);
            }
            for k in 0..b.ncols() {
                m[(i, n + k)] = Complex::new(b[(i, k)], 0.0);
            }
        }
        full_row_rank(&m)
    })
}

pub fn pbh_observable(a: &DMatrix<f64>, c: &DMatrix<f64>) -> bool {
    pbh_controllable(&a.transpose(), &c.transpose())
}

/// Components of the graph that keeps pairs of weight at least `threshold`.
pub fn threshold_components(
    n: usize,
    edges: &[(f64, usize, usize)],
    threshold: f64,
) -> Vec<Vec<usize>> {
    let kept: Vec<(usize, usize)> = edges
        .iter()
        .filter(|e| e.0 >= threshold)
        .flat_map(|&(_, i, j)| [(i, j), (j, i)])
        .collect();
    let mut label = vec![usize::MAX; n];
    let mut comps = Vec::new();
    for v in 0..n {
        if label[v] != usize::MAX {
            continue;
        }
        let comp = bfs(n, &kept, &[v]);
        for &u in &comp {
            label[u] = comps.len();
        }
        comps.push(comp);
    }
    comps
}

/// Single-linkage clustering with `r` clusters for distinct weights: the
/// components of the largest threshold graph with exactly `r` components.
pub fn single_linkage(
    n: usize,
    edges: &[(f64, usize, usize)],
    r: usize,
) -> Option<Vec<Vec<usize>>> {
    if r == n {
        return Some((0..n).map(|v| vec![v]).collect());
    }
    let mut ws: Vec<f64> = edges.iter().map(|e| e.0).collect();
    ws.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ws.into_iter()
        .map(|t| threshold_components(n, edges, t))
        .find(|c| c.len() == r)
}

/// Squared H2 norm of the impulse response `c (e^{at} - J) b` by quadrature.
pub fn quadrature_h2_squared(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let p = quadrature_gramian(a, b);
    (c * p * c.transpose()).trace()
}

/// Block diagonal of two square matrices.
pub fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, r) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(n + r, n + r);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((n, n), (r, r)).copy_from(b);
    m
}

pub fn stack_rows(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    m.rows_mut(0, a.nrows()).copy_from(a);
    m.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    m
}

pub fn stack_cols(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    stack_rows(&a.transpose(), &b.transpose()).transpose()
}

/// Random selection of `k` distinct vertices.
pub fn pick(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v.truncate(k);
    v.sort_unstable();
    v
}

/// Random weakly connected network with selector or dense input and output
/// matrices of up to three columns and rows.
pub fn random_network(r: &mut ChaCha8Rng, n: usize) -> NetworkSystem {
    let g = random_weak_digraph(r, n, (3.0 / n as f64).min(0.9));
    let p = r.gen_range(1..=3.min(n));
    let q = r.gen_range(1..=3.min(n));
    let f = if r.gen_bool(0.5) {
        netred::network::selector_input(n, &pick(r, n, p))
    } else {
        random_matrix(r, n, p)
    };
    let h = if r.gen_bool(0.5) {
        netred::network::selector_output(n, &pick(r, n, q))
    } else {
        random_matrix(r, q, n)
    };
    NetworkSystem::new(g, f, h).unwrap()
}

/// A random network of order `n` and a random proper reduction of it.
pub fn random_reduction(seed: u64, n: usize) -> (ReferenceModel, ReducedNetwork) {
    use netred::strategy::{ClusteringContext, ClusteringStrategy, RandomClustering};
    let tol = Tolerances::default();
    let mut r = rng(seed);
    let sys = random_network(&mut r, n);
    let reference = ReferenceModel::new(sys, &tol).unwrap();
    let classes = clusterability_classes(&reference.system, &reference.dec, &tol);
    let d = dissimilarity_from_factors(
        &reference.system,
        &reference.p_factor,
        &reference.q_factor,
        &classes,
    );
    let order = r.gen_range(classes.count()..=n);
    let ctx = ClusteringContext {
        system: &reference.system,
        dissimilarity: &d,
        tolerances: tol,
        seed,
    };
    let clustering = RandomClustering.select(&ctx, order).unwrap();
    let reduced = project(&reference.system, &clustering, &classes, false).unwrap();
    (reference, reduced)
}

/// Agreement of two H2 errors to `rel` relative, above the rounding floor
/// `64 eps * scale` of a trace formula whose terms are bounded by `scale`.
pub fn errors_agree(a: f64, b: f64, scale: f64, rel: f64) -> bool {
    let (a2, b2) = (a * a, b * b);
    (a2 - b2).abs() <= 2.0 * rel * a2.max(b2) + 64.0 * f64::EPSILON * scale
}

/// Random `(a, b, c)`: either a random semistable matrix with up to three
/// zero eigenvalues or the negated Laplacian of a weakly connected digraph,
/// with up to three inputs and outputs.
pub fn random_triple(seed: u64, n: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let mut r = rng(seed);
    let a = if r.gen_bool(0.5) {
        let m = r.gen_range(0..=n.min(3));
        random_semistable(&mut r, n, m)
    } else {
        -netred::graph::build_laplacian(&random_weak_digraph(&mut r, n, 0.2))
    };
    let p = r.gen_range(1..=3);
    let q = r.gen_range(1..=3);
    let b = random_matrix(&mut r, n, p);
    let c = random_matrix(&mut r, q, n);
    (a, b, c)
}
