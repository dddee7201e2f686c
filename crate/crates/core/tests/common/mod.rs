#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sagm_core::objective::{make_mlp, Activation, Mlp};
use sagm_core::{Batch, Objective, ParamVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

pub fn random_params(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> ParamVector {
    ParamVector::new(normal_vec(rng, dim, scale)).unwrap()
}

pub fn random_batch(
    rng: &mut ChaCha8Rng,
    rows: usize,
    n_features: usize,
    n_classes: usize,
) -> Batch {
    let features = normal_vec(rng, rows * n_features, 1.0);
    let labels = (0..rows).map(|_| rng.random_range(0..n_classes)).collect();
    let domains = (0..rows).map(|i| i % 3).collect();
    Batch::new(n_features, features, labels, domains).unwrap()
}

/// A small tanh MLP with a random parameter point and batch.
pub fn mlp_state(seed: u64) -> (Mlp, ParamVector, Batch) {
    let mut r = rng(seed);
    let mlp = make_mlp(&[3, 5, 3], Activation::Tanh, seed).unwrap();
    let params = random_params(&mut r, mlp.param_dim(), 0.7);
    let batch = random_batch(&mut r, 16, 3, 3);
    (mlp, params, batch)
}

pub fn rel_err(a: &ParamVector, b: &ParamVector) -> f64 {
    let diff = a.sub(b).unwrap().norm();
    diff / a.norm().max(b.norm()).max(1e-300)
}
