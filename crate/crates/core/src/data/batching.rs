use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::MultiDomainDataset;
use crate::error::{Error, Result};
use crate::objective::Batch;

/// Random state owned by one training run.
pub type RngState = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> RngState {
    RngState::seed_from_u64(seed)
}

/// Draws `per_domain` examples from every source domain, without
/// replacement inside the call, and concatenates them in domain order.
pub fn balanced_minibatch(
    sources: &MultiDomainDataset,
    per_domain: usize,
    rng: &mut RngState,
) -> Result<Batch> {
    if per_domain == 0 {
        return Err(Error::invalid("per_domain must be at least 1"));
    }
    let mut parts = Vec::with_capacity(sources.n_domains());
    for d in sources.domains() {
        if d.len() < per_domain {
            return Err(Error::invalid(format!(
                "domain {} has {} examples, fewer than per_domain = {per_domain}",
                d.id(),
                d.len()
            )));
        }
        let idx = sample(rng, d.len(), per_domain).into_vec();
        parts.push(d.examples().select(&idx));
    }
    Batch::concat(&parts)
}
