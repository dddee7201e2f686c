mod common;

use proptest::prelude::*;
use sagm_core::objective::{
    finite_diff_grad, hessian_vector_product, make_logreg, make_mlp, make_quadratic,
    make_rosenbrock, make_two_minima_landscape, Activation, Quadratic, DEFAULT_FD_STEP,
};
use sagm_core::sharpness::eq7_check;
use sagm_core::{Batch, Classifier, Objective, ParamVector};

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mlp_gradient_matches_finite_differences(seed in 0u64..10_000, hidden in 1usize..6, classes in 2usize..4) {
        let mut r = rng(seed);
        let mlp = make_mlp(&[2, hidden, classes], Activation::Tanh, seed).unwrap();
        let params = random_params(&mut r, mlp.param_dim(), 0.8);
        let batch = random_batch(&mut r, 10, 2, classes);
        let g = mlp.grad(&params, &batch).unwrap();
        let fd = finite_diff_grad(&mlp, &params, &batch, DEFAULT_FD_STEP).unwrap();
        prop_assert!(rel_err(&g, &fd) < 1e-6);
    }

    #[test]
    fn logreg_gradient_matches_finite_differences(seed in 0u64..10_000, features in 1usize..5, classes in 2usize..5) {
        let mut r = rng(seed);
        let lr = make_logreg(features, classes).unwrap();
        let params = random_params(&mut r, lr.param_dim(), 1.0);
        let batch = random_batch(&mut r, 9, features, classes);
        let g = lr.grad(&params, &batch).unwrap();
        let fd = finite_diff_grad(&lr, &params, &batch, DEFAULT_FD_STEP).unwrap();
        prop_assert!(rel_err(&g, &fd) < 1e-6);
    }

    #[test]
    fn loss_is_additive_over_domains(seed in 0u64..10_000, n1 in 1usize..12, n2 in 1usize..12) {
        let mut r = rng(seed);
        let mlp = make_mlp(&[2, 3, 2], Activation::Tanh, seed).unwrap();
        let params = random_params(&mut r, mlp.param_dim(), 0.8);
        let a = random_batch(&mut r, n1, 2, 2);
        let b = random_batch(&mut r, n2, 2, 2);
        let joint = Batch::concat([&a, &b]).unwrap();
        let weighted = (n1 as f64 * mlp.loss(&params, &a).unwrap() + n2 as f64 * mlp.loss(&params, &b).unwrap())
            / (n1 + n2) as f64;
        prop_assert!((mlp.loss(&params, &joint).unwrap() - weighted).abs() < 1e-12);
    }

    #[test]
    fn analytic_objectives_ignore_the_batch(seed in 0u64..10_000, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let mut r = rng(seed);
        let batch = random_batch(&mut r, 5, 2, 2);
        let empty = Batch::empty();
        let wells = make_two_minima_landscape(&[-1.0, 1.0], &[1.0, 0.4], &[0.08, 0.8]).unwrap();
        let rosen = make_rosenbrock(1.0, 100.0).unwrap();
        let p1 = ParamVector::new(vec![x]).unwrap();
        let p2 = ParamVector::new(vec![x, y]).unwrap();
        prop_assert_eq!(wells.loss(&p1, &batch).unwrap(), wells.loss(&p1, &empty).unwrap());
        prop_assert_eq!(rosen.grad(&p2, &batch).unwrap(), rosen.grad(&p2, &empty).unwrap());
    }

    #[test]
    fn quadratic_hessian_is_constant(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let q = Quadratic::rotated(&[0.3, 1.5, 4.0, 9.0], seed).unwrap();
        let v = random_params(&mut r, 4, 1.0);
        let at_origin = hessian_vector_product(&q, &ParamVector::zeros(4), &v, &Batch::empty(), 1e-4).unwrap();
        let elsewhere = hessian_vector_product(&q, &random_params(&mut r, 4, 2.0), &v, &Batch::empty(), 1e-4).unwrap();
        prop_assert!(rel_err(&at_origin, &elsewhere) < 1e-8);
    }
}

#[test]
fn quadratic_gap_relation_is_exact() {
    for seed in 0..10 {
        let q = Quadratic::rotated(&[0.5, 2.0, 6.5], seed).unwrap();
        for row in eq7_check(&q, &[0.01, 0.05, 0.1]).unwrap() {
            assert!((row.exact_ratio - 6.5).abs() < 1e-12);
            assert!(row.rel_error < 1e-9, "{row:?}");
        }
    }
    let axis = make_quadratic(&[1.0, 3.0]).unwrap();
    assert!(eq7_check(&axis, &[0.1]).unwrap()[0].rel_error < 1e-12);
}

#[test]
fn eq7_check_rejects_non_quadratics() {
    let rosen = make_rosenbrock(1.0, 100.0).unwrap();
    assert!(eq7_check(&rosen, &[0.1]).is_err());
}

#[test]
fn mlp_hvp_is_symmetric() {
    for seed in 0..20 {
        let (mlp, p, b) = mlp_state(seed);
        let mut r = rng(seed + 99);
        let u = random_params(&mut r, p.dim(), 1.0);
        let v = random_params(&mut r, p.dim(), 1.0);
        let uhv = u
            .dot(&hessian_vector_product(&mlp, &p, &v, &b, 1e-5).unwrap())
            .unwrap();
        let vhu = v
            .dot(&hessian_vector_product(&mlp, &p, &u, &b, 1e-5).unwrap())
            .unwrap();
        assert!(
            (uhv - vhu).abs() <= 1e-5 * uhv.abs().max(vhu.abs()).max(1.0),
            "{uhv} vs {vhu}"
        );
    }
}

#[test]
fn relu_gradient_matches_away_from_kinks() {
    let mut r = rng(5);
    let mlp = make_mlp(&[2, 6, 3], Activation::Relu, 5).unwrap();
    let params = mlp.initial_params();
    let batch = random_batch(&mut r, 8, 2, 3);
    let g = mlp.grad(&params, &batch).unwrap();
    let fd = finite_diff_grad(&mlp, &params, &batch, 1e-7).unwrap();
    assert!(rel_err(&g, &fd) < 1e-5);
}

#[test]
fn classifier_accuracy_counts_matches() {
    let lr = make_logreg(2, 2).unwrap();
    // class 1 iff x0 > 0
    let params = ParamVector::new(vec![-1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
    let batch = Batch::new(
        2,
        vec![1.0, 0.0, -1.0, 0.0, 2.0, 1.0, -3.0, 1.0],
        vec![1, 0, 0, 0],
        vec![0; 4],
    )
    .unwrap();
    assert_eq!(lr.accuracy(&params, &batch).unwrap(), 0.75);
}
