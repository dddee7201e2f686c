//! The effective-gradient rules.
//!
//! Every rule costs two fused loss+gradient evaluations: one at `θ` and one
//! at a displaced point `θ + c·∇L(θ)`. Gradients never flow through the
//! displacement; the rule only reads `∇L` at the displaced point.
//!
//! | rule    | displacement scale `c`  | returned direction          |
//! |---------|-------------------------|-----------------------------|
//! | ERM     | `ρ/‖g‖` (probe only)    | `g`                         |
//! | SAM     | `ρ/‖g‖`                 | `g_p`                       |
//! | GSAM    | `ρ/‖g‖`                 | `g_p − β·g_⊥`               |
//! | ERM+SAM | `ρ/‖g‖`                 | `g + g_p`                   |
//! | SAGM    | `ρ/‖g‖ − α`             | `g + ∇L(θ + c·g)`           |
//!
//! When `‖g‖ < DEGENERATE_NORM` the displacement is zero for every rule.

use serde::{Deserialize, Serialize};

use super::hyper::{HyperParams, Rule};
use crate::error::{Error, Result};
use crate::objective::{Batch, Objective};
use crate::param::ParamVector;

/// Gradient norms below this are treated as a stationary point.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Diagnostics for one rule evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    /// `L(θ)`.
    pub loss: f64,
    /// Loss at the displaced point.
    pub perturbed_loss: f64,
    /// `perturbed_loss − loss`.
    pub gap: f64,
    pub grad_norm: f64,
    pub perturbed_grad_norm: f64,
    /// Cosine between `∇L(θ)` and the gradient at the displaced point.
    pub cos_alignment: f64,
    /// Scalar multiplying `∇L(θ)` in the displacement.
    pub effective_radius: f64,
}

fn scale_for(grad_norm: f64, rho: f64) -> f64 {
    if grad_norm < DEGENERATE_NORM {
        0.0
    } else {
        rho / grad_norm
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::invalid(format!(
            "rho must be finite and >= 0, got {rho}"
        )));
    }
    Ok(())
}

/// `ρ·g/‖g‖`, or the zero vector when `‖g‖` is degenerate.
pub fn perturbation(g: &ParamVector, rho: f64) -> Result<ParamVector> {
    check_rho(rho)?;
    g.scale(scale_for(g.norm(), rho))
}

/// Cosine similarity; zero when either vector is degenerate.
pub fn gradient_alignment(g1: &ParamVector, g2: &ParamVector) -> Result<f64> {
    let dot = g1.dot(g2)?;
    let (n1, n2) = (g1.norm(), g2.norm());
    if n1 < DEGENERATE_NORM || n2 < DEGENERATE_NORM {
        return Ok(0.0);
    }
    Ok((dot / (n1 * n2)).clamp(-1.0, 1.0))
}

struct TwoPoint {
    grad: ParamVector,
    displaced_grad: ParamVector,
    report: StepReport,
}

/// Evaluates `L, ∇L` at `θ` and at `θ + c·∇L(θ)` where `c = scale(‖∇L‖)`.
fn two_point(
    obj: &dyn Objective,
    params: &ParamVector,
    batch: &Batch,
    scale: impl FnOnce(f64) -> f64,
) -> Result<TwoPoint> {
    let (loss, grad) = obj.value_and_grad(params, batch)?;
    let grad_norm = grad.norm();
    let c = if grad_norm < DEGENERATE_NORM {
        0.0
    } else {
        scale(grad_norm)
    };
    let displaced = params.add(&grad.scale(c)?)?;
    let (perturbed_loss, displaced_grad) = obj.value_and_grad(&displaced, batch)?;
    let report = StepReport {
        loss,
        perturbed_loss,
        gap: perturbed_loss - loss,
        grad_norm,
        perturbed_grad_norm: displaced_grad.norm(),
        cos_alignment: gradient_alignment(&grad, &displaced_grad)?,
        effective_radius: c,
    };
    Ok(TwoPoint {
        grad,
        displaced_grad,
        report,
    })
}

/// Plain gradient. The report still probes the SAM point at radius `rho`.
pub fn erm_gradient(
    obj: &dyn Objective,
    params: &ParamVector,
    batch: &Batch,
    rho: f64,
) -> Result<(ParamVector, StepReport)> {
    check_rho(rho)?;
    let tp = two_point(obj, params, batch, |n| rho / n)?;
    Ok((tp.grad, tp.report))
}

/// `∇L` evaluated at `θ + ρ∇L/‖∇L‖`.
pub fn sam_gradient(
    obj: &dyn Objective,
    params: &ParamVector,
    batch: &Batch,
    rho: f64,
) -> Result<(ParamVector, StepReport)> {
    check_rho(rho)?;
    let tp = two_point(obj, params, batch, |n| rho / n)?;
    Ok((tp.displaced_grad, tp.report))
}

/// Split of `g` into components parallel and orthogonal to `g_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub parallel: ParamVector,
    pub orthogonal: ParamVector,
}

/// `None` when `g_p` is degenerate.
pub fn decompose(g: &ParamVector, g_p: &ParamVector) -> Result<Option<Decomposition>> {
    let gp_sq = g_p.dot(g_p)?;
    if gp_sq.sqrt() < DEGENERATE_NORM {
        return Ok(None);
    }
    let parallel = g_p.scale(g.dot(g_p)? / gp_sq)?;
    let orthogonal = g.sub(&parallel)?;
    Ok(Some(Decomposition {
        parallel,
        orthogonal,
    }))
}

/// `g_p − β·g_⊥`; falls back to `g_p` when `g_p` is degenerate.
pub fn gsam_direction(g: &ParamVector, g_p: &ParamVector, beta: f64) -> Result<ParamVector> {
    match decompose(g, g_p)? {
        Some(d) => g_p.axpy(-beta, &d.orthogonal),
        None => Ok(g_p.clone()),
    }
}

pub fn gsam_gradient(
    obj: &dyn Objective,
    params: &ParamVector,
    batch: &Batch,
    rho: f64,
    beta: f64,
) -> Result<(ParamVector, StepReport)> {
    check_rho(rho)?;
    let tp = two_point(obj, params, batch, |n| rho / n)?;
    let direction = gsam_direction(&tp.grad, &tp.displaced_grad, beta)?;
    Ok((direction, tp.report))
}

/// `∇L(θ) + ∇L_p(θ)`.
pub fn erm_sam_gradient(
    obj: &dyn Objective,
    params: &ParamVector,
    batch: &Batch,
    rho: f64,
) -> Result<(ParamVector, StepReport)> {
    check_rho(rho)?;
    let tp = two_point(obj, params, batch, |n| rho / n)?;
    Ok((tp.grad.add(&tp.displaced_grad)?, tp.report))
}

/// `∇L(θ) + ∇L(θ + (ρ/‖∇L‖ − α)∇L)`. The scale is used unclamped and may go
/// negative when `‖∇L‖ > ρ/α`.
pub fn sagm_gradient(
    obj: &dyn Objective,
    params: &ParamVector,
    batch: &Batch,
    rho: f64,
    alpha: f64,
) -> Result<(ParamVector, StepReport)> {
    check_rho(rho)?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    let tp = two_point(obj, params, batch, |n| rho / n - alpha)?;
    Ok((tp.grad.add(&tp.displaced_grad)?, tp.report))
}

/// `h(θ) = L(θ + ρ∇L/‖∇L‖) − L(θ)`.
pub fn surrogate_gap(
    obj: &dyn Objective,
    params: &ParamVector,
    batch: &Batch,
    rho: f64,
) -> Result<f64> {
    let (loss, grad) = obj.value_and_grad(params, batch)?;
    let eps = perturbation(&grad, rho)?;
    Ok(obj.loss(&params.add(&eps)?, batch)? - loss)
}

/// Dispatches on `rule` with the matching fields of `hp`.
pub fn rule_gradient(
    rule: Rule,
    obj: &dyn Objective,
    params: &ParamVector,
    batch: &Batch,
    hp: &HyperParams,
) -> Result<(ParamVector, StepReport)> {
    match rule {
        Rule::Erm => erm_gradient(obj, params, batch, hp.rho),
        Rule::Sam => sam_gradient(obj, params, batch, hp.rho),
        Rule::Gsam => gsam_gradient(obj, params, batch, hp.rho, hp.beta),
        Rule::ErmSam => erm_sam_gradient(obj, params, batch, hp.rho),
        Rule::Sagm => sagm_gradient(obj, params, batch, hp.rho, hp.alpha),
    }
}
