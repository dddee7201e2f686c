//! Derivative approximations built only from `loss` and `grad` calls.

use super::{Batch, Objective};
use crate::error::{Error, Result};
use crate::param::ParamVector;

pub const DEFAULT_FD_STEP: f64 = 1e-5;

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    Ok(())
}

/// Coordinate-wise central differences of the loss.
pub fn finite_diff_grad(
    obj: &dyn Objective,
    params: &ParamVector,
    batch: &Batch,
    step: f64,
) -> Result<ParamVector> {
    check_step(step)?;
    let mut g = Vec::with_capacity(params.dim());
    for i in 0..params.dim() {
        let e = ParamVector::basis(params.dim(), i)?;
        let plus = obj.loss(&params.axpy(step, &e)?, batch)?;
        let minus = obj.loss(&params.axpy(-step, &e)?, batch)?;
        g.push((plus - minus) / (2.0 * step));
    }
    ParamVector::new(g)
}

/// `H·v ≈ (∇L(θ + s·v) − ∇L(θ − s·v)) / (2s)`.
pub fn hessian_vector_product(
    obj: &dyn Objective,
    params: &ParamVector,
    v: &ParamVector,
    batch: &Batch,
    step: f64,
) -> Result<ParamVector> {
    check_step(step)?;
    if v.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: v.dim(),
        });
    }
    if v.norm() == 0.0 {
        return Err(Error::invalid(
            "hessian-vector product needs a nonzero direction",
        ));
    }
    let plus = obj.grad(&params.axpy(step, v)?, batch)?;
    let minus = obj.grad(&params.axpy(-step, v)?, batch)?;
    plus.sub(&minus)?.scale(1.0 / (2.0 * step))
}
