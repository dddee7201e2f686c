use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::dataset::{Domain, MultiDomainDataset, Provenance};
use crate::error::{Error, Result};

const N_CLASSES: usize = 2;
/// Class means of the unrotated base distribution.
const CLASS_MEANS: [[f64; 2]; N_CLASSES] = [[-1.0, 0.0], [1.0, 0.0]];

/// Two Gaussian blobs in the plane; domain `i` is the base distribution
/// rotated by `i · angle_step_degrees`. Labels alternate so every domain is
/// class-balanced.
pub fn make_rotated_domains(
    n_domains: usize,
    n_per_domain: usize,
    angle_step_degrees: f64,
    noise_std: f64,
    seed: u64,
) -> Result<MultiDomainDataset> {
    if n_domains < 2 {
        return Err(Error::invalid("need at least two domains"));
    }
    if n_per_domain < 2 * N_CLASSES {
        return Err(Error::invalid(format!(
            "need at least {} examples per domain",
            2 * N_CLASSES
        )));
    }
    if !angle_step_degrees.is_finite() {
        return Err(Error::invalid("angle step must be finite"));
    }
    let bad_noise = || {
        Error::invalid(format!(
            "noise_std must be finite and >= 0, got {noise_std}"
        ))
    };
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(bad_noise());
    }
    let noise = Normal::new(0.0, noise_std).map_err(|_| bad_noise())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut domains = Vec::with_capacity(n_domains);
    for i in 0..n_domains {
        let (sin, cos) = (i as f64 * angle_step_degrees).to_radians().sin_cos();
        let mut features = Vec::with_capacity(2 * n_per_domain);
        let mut labels = Vec::with_capacity(n_per_domain);
        for j in 0..n_per_domain {
            let y = j % N_CLASSES;
            let x0 = CLASS_MEANS[y][0] + noise.sample(&mut rng);
            let x1 = CLASS_MEANS[y][1] + noise.sample(&mut rng);
            features.push(cos * x0 - sin * x1);
            features.push(sin * x0 + cos * x1);
            labels.push(y);
        }
        domains.push(Domain::new(i, 2, features, labels)?);
    }
    MultiDomainDataset::new(
        domains,
        N_CLASSES,
        Provenance {
            generator: "rotated_domains".into(),
            seed: Some(seed),
            angle_step_degrees: Some(angle_step_degrees),
            noise_std: Some(noise_std),
        },
    )
}
