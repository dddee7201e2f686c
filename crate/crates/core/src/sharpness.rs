//! Local sharpness measurements.
//!
//! Two views of sharpness are provided: the gradient-direction gap
//! `h_ρ(θ) = L(θ + ρ∇L/‖∇L‖) − L(θ)` swept over a grid of radii, and the
//! dominant Hessian eigenvalue from power iteration on Hessian-vector
//! products. Near a minimum they are related by `λ_max ≈ 2h/ρ²`; that
//! relation is exact for quadratics, where [`eq7_check`] verifies it against
//! the closed-form ball maximum.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{hessian_vector_product, Batch, Objective, DEFAULT_FD_STEP};
use crate::optim::DEGENERATE_NORM;
use crate::param::ParamVector;

/// Settings for [`dominant_eigenvalue`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    pub hvp_step: f64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            tol: 1e-10,
            seed: 0,
            hvp_step: DEFAULT_FD_STEP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub value: f64,
    pub iterations: usize,
}

fn unit_sphere_sample(dim: usize, seed: u64) -> Result<ParamVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // a private stream keeps the start independent of other generators
    // seeded with the same value, such as `Quadratic::rotated`
    rng.set_stream(0x9e37_79b9);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let v = ParamVector::new(v)?;
        let n = v.norm();
        if n > 1e-8 {
            return v.scale(1.0 / n);
        }
    }
}

/// Largest-magnitude Hessian eigenvalue by power iteration.
///
/// Stops once two successive Rayleigh quotients differ by less than
/// `tol · max(1, |λ|)`; otherwise fails with [`Error::NotConverged`] carrying
/// the last estimate.
pub fn dominant_eigenvalue(
    obj: &dyn Objective,
    params: &ParamVector,
    data: &Batch,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<EigenEstimate> {
    power_iteration(
        obj,
        params,
        data,
        &PowerIteration {
            max_iters,
            tol,
            seed,
            hvp_step: DEFAULT_FD_STEP,
        },
    )
}

pub fn power_iteration(
    obj: &dyn Objective,
    params: &ParamVector,
    data: &Batch,
    cfg: &PowerIteration,
) -> Result<EigenEstimate> {
    if cfg.max_iters == 0 {
        return Err(Error::invalid("power iteration needs max_iters >= 1"));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::invalid("power iteration needs tol > 0"));
    }
    let mut v = unit_sphere_sample(params.dim(), cfg.seed)?;
    let mut previous: Option<f64> = None;
    for k in 1..=cfg.max_iters {
        let hv = hessian_vector_product(obj, params, &v, data, cfg.hvp_step)?;
        let estimate = v.dot(&hv)?;
        let norm = hv.norm();
        if norm == 0.0 {
            return Ok(EigenEstimate {
                value: 0.0,
                iterations: k,
            });
        }
        if let Some(prev) = previous {
            if (estimate - prev).abs() < cfg.tol * estimate.abs().max(1.0) {
                return Ok(EigenEstimate {
                    value: estimate,
                    iterations: k,
                });
            }
        }
        previous = Some(estimate);
        v = hv.scale(1.0 / norm)?;
    }
    Err(Error::NotConverged {
        estimate: previous.unwrap_or(0.0),
        iterations: cfg.max_iters,
    })
}

/// Gap-versus-radius curve at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessProfile {
    pub radii: Vec<f64>,
    pub gaps: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_converged: bool,
    /// `2·gap/ρ²` at the smallest radius.
    pub eq7_estimate: f64,
    /// Set when `‖∇L‖` was too small to define a direction; gaps are then 0.
    pub degenerate_gradient: bool,
}

pub const PROFILE_CSV_HEADER: &str = "rho,gap,lambda_max_estimate";

impl SharpnessProfile {
    /// CSV with columns `rho,gap,lambda_max_estimate`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(PROFILE_CSV_HEADER.split(','))?;
        for (rho, gap) in self.radii.iter().zip(&self.gaps) {
            w.write_record([
                rho.to_string(),
                gap.to_string(),
                self.lambda_max.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::invalid("radius grid is empty"));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::invalid("radii must be finite and positive"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    Ok(())
}

/// Gradient-direction gaps over the full `data`, one per radius.
pub fn gap_curve(
    obj: &dyn Objective,
    params: &ParamVector,
    data: &Batch,
    radii: &[f64],
) -> Result<(Vec<f64>, bool)> {
    validate_radii(radii)?;
    let (loss, grad) = obj.value_and_grad(params, data)?;
    let norm = grad.norm();
    if norm < DEGENERATE_NORM {
        return Ok((vec![0.0; radii.len()], true));
    }
    let direction = grad.scale(1.0 / norm)?;
    let gaps = radii
        .par_iter()
        .map(|&rho| Ok(obj.loss(&params.axpy(rho, &direction)?, data)? - loss))
        .collect::<Result<Vec<f64>>>()?;
    Ok((gaps, false))
}

pub fn gap_profile(
    obj: &dyn Objective,
    params: &ParamVector,
    data: &Batch,
    radii: &[f64],
    power: &PowerIteration,
) -> Result<SharpnessProfile> {
    if obj.kind().is_data_driven() && data.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let (gaps, degenerate) = gap_curve(obj, params, data, radii)?;
    let (lambda_max, lambda_converged) = match power_iteration(obj, params, data, power) {
        Ok(e) => (e.value, true),
        Err(Error::NotConverged { estimate, .. }) => (estimate, false),
        Err(e) => return Err(e),
    };
    let eq7_estimate = 2.0 * gaps[0] / (radii[0] * radii[0]);
    Ok(SharpnessProfile {
        radii: radii.to_vec(),
        gaps,
        lambda_max,
        lambda_converged,
        eq7_estimate,
        degenerate_gradient: degenerate,
    })
}

/// `½ρ²·λ_max`: the exact maximum of a quadratic over the ρ-ball around its
/// minimum.
pub fn exact_quadratic_gap(eigenvalues: &[f64], rho: f64) -> Result<f64> {
    if eigenvalues.is_empty() {
        return Err(Error::invalid("empty eigenvalue list"));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid(format!("rho must be positive, got {rho}")));
    }
    let lmax = eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(0.5 * rho * rho * lmax)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eq7Row {
    pub rho: f64,
    /// `2·exact_quadratic_gap/ρ²`.
    pub exact_ratio: f64,
    /// `2·h/ρ²` with `h` measured on the objective along the top eigenvector.
    pub measured_ratio: f64,
    pub lambda_max: f64,
    /// `|measured_ratio − λ_max| / |λ_max|`.
    pub rel_error: f64,
}

/// Checks `λ_max = 2h/ρ²` at the minimum of a quadratic objective.
pub fn eq7_check(obj: &dyn Objective, rho_grid: &[f64]) -> Result<Vec<Eq7Row>> {
    let q = obj
        .as_quadratic()
        .ok_or_else(|| Error::invalid("eq7 check requires a quadratic objective"))?;
    let spectrum = q.eigenvalues();
    let top = spectrum
        .iter()
        .enumerate()
        .fold(0, |best, (i, &l)| if l > spectrum[best] { i } else { best });
    let lambda_max = spectrum[top];
    let u = q.eigenvector(top)?;
    let origin = ParamVector::zeros(q.param_dim());
    let batch = Batch::empty();
    let base = obj.loss(&origin, &batch)?;
    rho_grid
        .iter()
        .map(|&rho| {
            let exact = exact_quadratic_gap(spectrum, rho)?;
            let measured = obj.loss(&u.scale(rho)?, &batch)? - base;
            let measured_ratio = 2.0 * measured / (rho * rho);
            Ok(Eq7Row {
                rho,
                exact_ratio: 2.0 * exact / (rho * rho),
                measured_ratio,
                lambda_max,
                rel_error: (measured_ratio - lambda_max).abs() / lambda_max.abs(),
            })
        })
        .collect()
}
