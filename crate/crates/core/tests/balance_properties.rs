mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use netred::balance::{build_balanced_form, frobenius_left_vector, is_generalized_balanced};
use netred::graph::{block_triangular_permutation, build_laplacian, scc_decompose, DiGraph, Edge};
use proptest::prelude::*;

/// Left null vector from a bordered linear solve: `L^T nu = 0` with the last
/// equation replaced by `sum(nu) = 1`.
fn bordered_left_null(l: &DMatrix<f64>) -> DVector<f64> {
    let k = l.nrows();
    let mut a = l.transpose();
    for j in 0..k {
        a[(k - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(k);
    rhs[k - 1] = 1.0;
    a.lu().solve(&rhs).expect("bordered system is nonsingular")
}

#[test]
fn example_weights_and_balance() {
    let g = example_graph();
    let scc = scc_decompose(&g);
    let bf = build_balanced_form(&g, &scc).unwrap();
    assert_eq!(bf.weights.as_slice().len(), 6);
    let expected = [2.0, 1.0, 1.0, 1.0, 1.0, 3.0];
    for (w, e) in bf.weights.iter().zip(expected) {
        assert!((w - e).abs() <= 1e-12, "{w} vs {e}");
    }
    assert!(is_generalized_balanced(&bf.laplacian, &scc));
    assert!(!is_generalized_balanced(&example_laplacian(), &scc));
}

#[test]
fn symmetric_laplacian_is_balanced() {
    let mut r = rng(5);
    let g = random_strong_digraph(&mut r, 6);
    let mut pairs = std::collections::BTreeMap::new();
    for e in g.edges() {
        pairs
            .entry((e.source.min(e.target), e.source.max(e.target)))
            .or_insert(e.weight);
    }
    let sym = DiGraph::new(
        6,
        pairs
            .iter()
            .flat_map(|(&(a, b), &w)| [Edge::new(a, b, w), Edge::new(b, a, w)]),
    )
    .unwrap();
    let l = build_laplacian(&sym);
    assert_eq!(l, l.transpose());
    assert!(is_generalized_balanced(&l, &scc_decompose(&sym)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_vector_is_positive_and_matches_oracle(seed in any::<u64>(), n in 2usize..=10) {
        let mut r = rng(seed);
        let g = random_strong_digraph(&mut r, n);
        let l = build_laplacian(&g);
        let nu = frobenius_left_vector(&l, 10.0).unwrap();
        prop_assert!(nu.min() > 0.0);
        prop_assert!((nu.min() - 1.0).abs() <= 1e-14);
        let oracle = bordered_left_null(&l);
        prop_assert!(oracle.min() > 0.0);
        let oracle = &oracle / oracle.min();
        prop_assert!((&nu - &oracle).norm() <= 1e-9 * oracle.norm());
    }

    #[test]
    fn balanced_form_zeroes_leading_row_and_column_sums(seed in any::<u64>(), n in 2usize..=14) {
        let mut r = rng(seed);
        let g = random_weak_digraph(&mut r, n, 0.15);
        let scc = scc_decompose(&g);
        let bf = build_balanced_form(&g, &scc).unwrap();
        let l = &bf.laplacian;
        let scale = l.norm();
        for i in 0..n {
            prop_assert!(l.row(i).sum().abs() <= 1e-10 * scale);
        }
        for &c in &scc.leading {
            for &i in &scc.components[c] {
                let col: f64 = scc.components[c].iter().map(|&j| l[(j, i)]).sum();
                prop_assert!(col.abs() <= 1e-10 * scale);
            }
        }
        prop_assert!(bf.weights.min() >= 1.0 - 1e-14);
        // Vertices outside the leading components keep unit weight, so the
        // weight vector is block-structured along the permutation.
        let perm = block_triangular_permutation(&scc);
        let lead = scc.leading_vertices();
        for &v in &perm {
            if !lead.contains(&v) {
                prop_assert_eq!(bf.weights[v], 1.0);
            }
        }
    }
}
