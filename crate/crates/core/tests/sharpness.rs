mod common;

use sagm_core::objective::{hessian_vector_product, make_quadratic, Constant};
use sagm_core::sharpness::{dominant_eigenvalue, gap_profile, PowerIteration, PROFILE_CSV_HEADER};
use sagm_core::{Batch, Error, ParamVector};

use common::*;

/// Dense symmetric Hessian assembled column by column.
fn dense_hessian(obj: &dyn sagm_core::Objective, p: &ParamVector, b: &Batch) -> Vec<Vec<f64>> {
    let n = p.dim();
    let cols: Vec<ParamVector> = (0..n)
        .map(|j| {
            hessian_vector_product(obj, p, &ParamVector::basis(n, j).unwrap(), b, 1e-5).unwrap()
        })
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (cols[j][i] + cols[i][j])).collect())
        .collect()
}

/// Largest-magnitude eigenvalue of a dense symmetric matrix: power
/// iteration on `H` and on the shifted `H − λ₁I` picks whichever end of the
/// spectrum dominates.
fn dense_dominant(h: &[Vec<f64>]) -> f64 {
    let power = |shift: f64| -> f64 {
        let n = h.len();
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let mut lambda = 0.0;
        for _ in 0..20_000 {
            let hv: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| h[i][j] * v[j]).sum::<f64>() - shift * v[i])
                .collect();
            let norm = hv.iter().map(|x| x * x).sum::<f64>().sqrt();
            lambda = v.iter().zip(&hv).map(|(a, b)| a * b).sum::<f64>();
            v = hv.iter().map(|x| x / norm).collect();
        }
        lambda + shift
    };
    let first = power(0.0);
    let other = power(first);
    if other.abs() > first.abs() {
        other
    } else {
        first
    }
}

#[test]
fn power_iteration_matches_dense_oracle_on_mlp() {
    for seed in 0..5 {
        let (mlp, p, b) = mlp_state(100 + seed);
        let oracle = dense_dominant(&dense_hessian(&mlp, &p, &b));
        let est = dominant_eigenvalue(&mlp, &p, &b, 20_000, 1e-12, seed).unwrap();
        assert!(
            (est.value - oracle).abs() <= 0.02 * oracle.abs(),
            "seed {seed}: {} vs {oracle}",
            est.value
        );
    }
}

#[test]
fn power_iteration_reports_non_convergence() {
    let q = make_quadratic(&[1.0, 0.999_999, 0.5]).unwrap();
    match dominant_eigenvalue(&q, &ParamVector::zeros(3), &Batch::empty(), 3, 1e-15, 0) {
        Err(Error::NotConverged {
            estimate,
            iterations,
        }) => {
            assert_eq!(iterations, 3);
            assert!(estimate > 0.5 && estimate <= 1.0 + 1e-9);
        }
        other => panic!("expected NotConverged, got {other:?}"),
    }
}

#[test]
fn profile_flags_degenerate_gradient() {
    let c = Constant { value: 2.0, dim: 3 };
    let prof = gap_profile(
        &c,
        &ParamVector::zeros(3),
        &Batch::empty(),
        &[0.01, 0.1],
        &PowerIteration::default(),
    )
    .unwrap();
    assert!(prof.degenerate_gradient);
    assert_eq!(prof.gaps, vec![0.0, 0.0]);
}

#[test]
fn profile_csv_has_one_row_per_radius() {
    let (mlp, p, b) = mlp_state(9);
    let radii = [0.01, 0.02, 0.05, 0.1];
    let prof = gap_profile(&mlp, &p, &b, &radii, &PowerIteration::default()).unwrap();
    let mut out = Vec::new();
    prof.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(PROFILE_CSV_HEADER));
    assert_eq!(lines.count(), radii.len());
}

#[test]
fn profile_rejects_bad_radii() {
    let (mlp, p, b) = mlp_state(1);
    for radii in [vec![], vec![0.1, 0.05], vec![-0.1], vec![0.0]] {
        assert!(gap_profile(&mlp, &p, &b, &radii, &PowerIteration::default()).is_err());
    }
}
