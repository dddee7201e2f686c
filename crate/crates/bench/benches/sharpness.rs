use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sagm_bench::mlp_fixture;
use sagm_core::objective::{hessian_vector_product, DEFAULT_FD_STEP};
use sagm_core::sharpness::{dominant_eigenvalue, gap_curve};

fn sharpness(c: &mut Criterion) {
    let (mlp, params, batch) = mlp_fixture(8, 32);
    let v = params.scale(1.0 / params.norm()).unwrap();
    c.bench_function("hessian_vector_product", |b| {
        b.iter(|| {
            hessian_vector_product(&mlp, black_box(&params), &v, &batch, DEFAULT_FD_STEP).unwrap()
        })
    });
    c.bench_function("gap_curve_4_radii", |b| {
        b.iter(|| gap_curve(&mlp, black_box(&params), &batch, &[0.01, 0.02, 0.05, 0.1]).unwrap())
    });
    c.bench_function("dominant_eigenvalue_200_iters", |b| {
        // a fixed iteration budget: tol too small to stop early
        b.iter(|| dominant_eigenvalue(&mlp, black_box(&params), &batch, 200, 1e-300, 0))
    });
}

criterion_group!(benches, sharpness);
criterion_main!(benches);
