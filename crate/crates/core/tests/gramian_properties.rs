mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use netred::linalg::singular_values;
use netred::semistable::{
    controllability_test, decompose, h2_membership, h2_norm, input_energy, observability_test,
    output_energy, particular_solution_projection, pseudo_controllability_gramian, pseudo_gramians,
    pseudo_observability_gramian,
};
use netred::{NetError, Tolerances};
use proptest::prelude::*;
use rand::Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn example_gramian_matches_quadrature() {
    let a = -example_laplacian();
    let b = DMatrix::identity(6, 6);
    let dec = decompose(&a, &tol()).unwrap();
    let p = pseudo_controllability_gramian(&dec, &b).unwrap();
    let j = &dec.projector;
    assert!((j * &p * j.transpose()).norm() <= 1e-10 * p.norm());
    let oracle = quadrature_gramian(&a, &b);
    assert!(
        (&p - &oracle).norm() <= 1e-6 * oracle.norm(),
        "{}",
        (&p - &oracle).norm()
    );
}

#[test]
fn zero_input_gives_zero_gramian() {
    let a = -example_laplacian();
    let dec = decompose(&a, &tol()).unwrap();
    let p = pseudo_controllability_gramian(&dec, &DMatrix::zeros(6, 2)).unwrap();
    assert_eq!(p.norm(), 0.0);
    assert_eq!(
        h2_norm(&dec, &DMatrix::zeros(6, 2), &DMatrix::identity(6, 6)).unwrap(),
        0.0
    );
}

#[test]
fn hurwitz_matrix_gives_standard_gramian() {
    let mut r = rng(11);
    let a = random_semistable(&mut r, 5, 0);
    let b = random_matrix(&mut r, 5, 2);
    let dec = decompose(&a, &tol()).unwrap();
    assert_eq!(dec.m, 0);
    let p = pseudo_controllability_gramian(&dec, &b).unwrap();
    let res = &a * &p + &p * a.transpose() + &b * b.transpose();
    assert!(res.norm() <= 1e-12 * p.norm().max(1.0));
    let any = p.clone();
    assert_eq!(particular_solution_projection(&dec, &b, &any).unwrap(), p);
}

#[test]
fn two_vertex_difference_system() {
    let a = DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]);
    let b = DMatrix::from_column_slice(2, 1, &[1.0, -1.0]);
    let c = b.transpose();
    let dec = decompose(&a, &tol()).unwrap();
    assert!(h2_membership(&dec, &b, &c));
    assert!(!controllability_test(&dec, &b).unwrap());
    assert!(!observability_test(&dec, &c).unwrap());
    assert!(controllability_test(&dec, &DMatrix::identity(2, 2)).unwrap());
}

#[test]
fn raw_example_transfer_is_not_in_h2() {
    let a = -example_laplacian();
    let dec = decompose(&a, &tol()).unwrap();
    let eye = DMatrix::identity(6, 6);
    assert!(!h2_membership(&dec, &eye, &eye));
    assert!(matches!(
        h2_norm(&dec, &eye, &eye),
        Err(NetError::NotInH2 { .. })
    ));
}

#[test]
fn input_energy_in_deflated_coordinates() {
    let mut r = rng(3);
    let a = random_semistable(&mut r, 6, 2);
    let b = random_matrix(&mut r, 6, 3);
    let dec = decompose(&a, &tol()).unwrap();
    let p = pseudo_controllability_gramian(&dec, &b).unwrap();
    let z = DVector::from_fn(4, |_, _| r.gen_range(-1.0..1.0));
    let x0 = &dec.u_bar * &z;
    let p_bar = dec.v_bar.transpose() * &p * &dec.v_bar;
    let expected = z.dot(&(p_bar.try_inverse().unwrap() * &z));
    let got = input_energy(&dec, &p, &x0).unwrap();
    assert!((got - expected).abs() <= 1e-8 * expected);
    let doubled = input_energy(&dec, &p, &(&x0 * 2.0)).unwrap();
    assert!((doubled - 4.0 * got).abs() <= 1e-8 * doubled);
    assert_eq!(input_energy(&dec, &p, &DVector::zeros(6)).unwrap(), 0.0);
    let q = pseudo_observability_gramian(&dec, &random_matrix(&mut r, 2, 6)).unwrap();
    assert!(output_energy(&dec, &q, &x0).unwrap() >= 0.0);
    let bad = &dec.u.column(0) * 1.0 + &x0;
    assert!(matches!(
        input_energy(&dec, &p, &bad),
        Err(NetError::InvalidInitialState { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn deflated_gramians_agree_with_kronecker_solution(seed in any::<u64>(), n in 2usize..=12) {
        let (a, b, c) = random_triple(seed, n);
        let dec = decompose(&a, &tol()).unwrap();
        let g = pseudo_gramians(&dec, &b, &c).unwrap();
        let pk = kronecker_gramian(&a, &b, &dec.projector);
        prop_assert!((&g.p - &pk).norm() <= 1e-8 * g.p.norm().max(f64::MIN_POSITIVE));
        let qk = kronecker_gramian(&a.transpose(), &c.transpose(), &dec.projector.transpose());
        prop_assert!((&g.q - &qk).norm() <= 1e-8 * g.q.norm().max(f64::MIN_POSITIVE));
        let j = &dec.projector;
        prop_assert!((j * &g.p * j.transpose()).norm() <= 1e-10 * g.p.norm());
        prop_assert!((j.transpose() * &g.q * j).norm() <= 1e-10 * g.q.norm());
    }

    #[test]
    fn limit_projector_properties(seed in any::<u64>(), n in 2usize..=10) {
        let (a, _, _) = random_triple(seed, n);
        let dec = decompose(&a, &tol()).unwrap();
        let j = &dec.projector;
        let scale = a.norm().max(1.0);
        prop_assert!((j * j - j).norm() <= 1e-10 * scale * j.norm().max(1.0));
        prop_assert!((&a * j).norm() <= 1e-10 * scale * j.norm().max(1.0));
        prop_assert!((j * &a).norm() <= 1e-10 * scale * j.norm().max(1.0));
        prop_assert!(dec.schur.spectral_abscissa() < 0.0 || dec.m == n);
        let horizon = settling_horizon(&a, j, 1e-10);
        prop_assert!(((&a * horizon).exp() - j).norm() <= 1e-8);
    }

    #[test]
    fn gramian_matches_quadrature(seed in any::<u64>(), n in 2usize..=8) {
        let (a, b, _) = random_triple(seed, n);
        let dec = decompose(&a, &tol()).unwrap();
        let p = pseudo_controllability_gramian(&dec, &b).unwrap();
        let oracle = quadrature_gramian(&a, &b);
        prop_assert!((&p - &oracle).norm() <= 1e-6 * oracle.norm().max(1e-12));
    }

    #[test]
    fn alternative_solutions_project_back(seed in any::<u64>(), n in 2usize..=10) {
        let (a, b, _) = random_triple(seed, n);
        let dec = decompose(&a, &tol()).unwrap();
        let p = pseudo_controllability_gramian(&dec, &b).unwrap();
        let mut r = rng(seed ^ 0x5eed);
        let d = random_matrix(&mut r, dec.m, dec.m);
        let alt = &p + &dec.u * (&d + d.transpose()) * dec.u.transpose();
        let back = particular_solution_projection(&dec, &b, &alt).unwrap();
        prop_assert!((&back - &p).norm() <= 1e-10 * p.norm().max(alt.norm()));
    }

    #[test]
    fn h2_norm_duality(seed in any::<u64>(), n in 2usize..=12) {
        let (a, b, c) = random_triple(seed, n);
        let dec = decompose(&a, &tol()).unwrap();
        // Annihilate the consensus part so the transfer function is in H2.
        let c = &c * dec.transient_projector();
        prop_assert!(h2_membership(&dec, &b, &c));
        let g = pseudo_gramians(&dec, &b, &c).unwrap();
        let primal = (&c * &g.p * c.transpose()).trace();
        let dual = (b.transpose() * &g.q * &b).trace();
        prop_assert!((primal - dual).abs() <= 1e-8 * primal.abs().max(dual.abs()));
        let norm = h2_norm(&dec, &b, &c).unwrap();
        prop_assert!((norm * norm - primal).abs() <= 1e-8 * primal);
    }

    #[test]
    fn structural_tests_match_pbh(seed in any::<u64>(), n in 2usize..=9, cols in 1usize..=3) {
        let mut r = rng(seed);
        let m = r.gen_range(0..=n.min(3));
        let a = random_semistable(&mut r, n, m);
        let mut b = random_matrix(&mut r, n, cols);
        if r.gen_bool(0.3) {
            // Inputs confined to an invariant subspace are uncontrollable.
            let dec = decompose(&a, &tol()).unwrap();
            b = dec.transient_projector() * b;
        }
        let c = b.transpose();
        let dec = decompose(&a, &tol()).unwrap();
        // Few inputs give Gramians with rapidly decaying spectra. Once the
        // smallest transient singular value drops below 1e-8 relative, a
        // system that is controllable in exact arithmetic can be numerically
        // uncontrollable, so only the PBH-negative direction is checked.
        let k = n - dec.m;
        let near_singular = |g: DMatrix<f64>| {
            let s = singular_values(&g);
            k > 0 && s[k - 1] <= 1e-8 * s[0]
        };
        let agrees = |test: bool, pbh: bool, near: bool| if near { pbh || !test } else { test == pbh };
        let ctrl = controllability_test(&dec, &b).unwrap();
        let near_p = near_singular(pseudo_controllability_gramian(&dec, &b).unwrap());
        prop_assert!(agrees(ctrl, pbh_controllable(&a, &b), near_p));
        let obs = observability_test(&dec, &c).unwrap();
        let near_q = near_singular(pseudo_observability_gramian(&dec, &c).unwrap());
        prop_assert!(agrees(obs, pbh_observable(&a, &c), near_q));
    }
}
