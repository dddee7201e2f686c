//! Shared fixtures for the criterion benches.

use sagm_core::data::{
    balanced_minibatch, leave_one_out_split, make_rotated_domains, rng_from_seed,
};
use sagm_core::objective::{make_mlp, Activation, Mlp};
use sagm_core::{Batch, Classifier, ParamVector};

/// A 2-`hidden`-2 tanh MLP, its seeded initial parameters and one balanced
/// 3 × `per_domain` batch from the rotated-domains generator.
pub fn mlp_fixture(hidden: usize, per_domain: usize) -> (Mlp, ParamVector, Batch) {
    let ds = make_rotated_domains(4, 200, 30.0, 0.3, 7).expect("valid generator arguments");
    let (sources, _) = leave_one_out_split(&ds, 3).expect("target index in range");
    let mlp = make_mlp(&[2, hidden, 2], Activation::Tanh, 0).expect("valid sizes");
    let params = mlp.initial_params();
    let batch = balanced_minibatch(&sources, per_domain, &mut rng_from_seed(0))
        .expect("domains large enough");
    (mlp, params, batch)
}
