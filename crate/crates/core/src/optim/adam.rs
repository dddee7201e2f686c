use serde::{Deserialize, Serialize};

use super::hyper::HyperParams;
use crate::error::{Error, Result};
use crate::param::ParamVector;

/// Adam moment estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    step_count: u64,
}

impl OptimizerState {
    pub fn new(dim: usize) -> Self {
        Self {
            first_moment: vec![0.0; dim],
            second_moment: vec![0.0; dim],
            step_count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.first_moment.len()
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.first_moment
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.second_moment
    }
}

/// One bias-corrected Adam step followed by decoupled weight decay
/// `θ' ← θ' − γ·λ·θ`.
pub fn adam_step(
    state: &OptimizerState,
    params: &ParamVector,
    grad: &ParamVector,
    hp: &HyperParams,
) -> Result<(ParamVector, OptimizerState)> {
    for found in [params.dim(), grad.dim()] {
        if found != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: state.dim(),
                found,
            });
        }
    }
    let (b1, b2) = (hp.adam_beta1, hp.adam_beta2);
    let t = state.step_count + 1;
    let bc1 = 1.0 - b1.powf(t as f64);
    let bc2 = 1.0 - b2.powf(t as f64);

    let mut m = state.first_moment.clone();
    let mut v = state.second_moment.clone();
    let mut next = Vec::with_capacity(params.dim());
    for i in 0..params.dim() {
        let (theta, g) = (params[i], grad[i]);
        m[i] = b1 * m[i] + (1.0 - b1) * g;
        v[i] = b2 * v[i] + (1.0 - b2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        let stepped = theta - hp.lr * m_hat / (v_hat.sqrt() + hp.adam_eps);
        next.push(stepped - hp.lr * hp.weight_decay * theta);
    }
    let next = ParamVector::new(next).map_err(|_| Error::NonFinite {
        context: "adam_step",
    })?;
    Ok((
        next,
        OptimizerState {
            first_moment: m,
            second_moment: v,
            step_count: t,
        },
    ))
}
