//! Differentiable objectives over flat parameter vectors.
//!
//! An [`Objective`] maps `(θ, batch)` to a scalar loss and its exact
//! gradient. Analytic landscapes ignore the batch; classifiers compute the
//! mean cross-entropy over it. Finite-difference oracles and Hessian-vector
//! products live in [`numeric`] and only ever call `loss`/`grad`.

mod analytic;
mod batch;
mod counting;
mod logreg;
mod mlp;
pub mod numeric;
mod xent;

use serde::{Deserialize, Serialize};

pub use analytic::{
    make_quadratic, make_rosenbrock, make_two_minima_landscape, Constant, Quadratic, Rosenbrock,
    TwoWells,
};
pub use batch::Batch;
pub use counting::{CallCounts, CountingObjective};
pub use logreg::{make_logreg, LogReg};
pub use mlp::{make_mlp, Activation, Mlp};
pub use numeric::{finite_diff_grad, hessian_vector_product, DEFAULT_FD_STEP};

use crate::error::{Error, Result};
use crate::param::ParamVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    Analytic1d,
    Analytic2d,
    Quadratic,
    LogisticRegression,
    Mlp,
}

impl ObjectiveKind {
    pub fn is_data_driven(self) -> bool {
        matches!(self, ObjectiveKind::LogisticRegression | ObjectiveKind::Mlp)
    }
}

/// A deterministic, differentiable scalar loss.
///
/// Implementations are immutable after construction, so every method may be
/// called concurrently.
pub trait Objective: Send + Sync {
    fn kind(&self) -> ObjectiveKind;

    fn param_dim(&self) -> usize;

    /// Mean loss over `batch`.
    fn loss(&self, params: &ParamVector, batch: &Batch) -> Result<f64>;

    /// Exact gradient of [`Objective::loss`].
    fn grad(&self, params: &ParamVector, batch: &Batch) -> Result<ParamVector>;

    fn value_and_grad(&self, params: &ParamVector, batch: &Batch) -> Result<(f64, ParamVector)> {
        Ok((self.loss(params, batch)?, self.grad(params, batch)?))
    }

    /// Downcast hook for analyses that need the closed-form spectrum.
    fn as_quadratic(&self) -> Option<&Quadratic> {
        None
    }
}

/// An objective that is also a classifier over feature rows.
pub trait Classifier: Objective {
    fn n_features(&self) -> usize;

    fn n_classes(&self) -> usize;

    fn logits(&self, params: &ParamVector, row: &[f64]) -> Vec<f64>;

    /// Deterministic initial parameters.
    fn initial_params(&self) -> ParamVector;

    fn predict(&self, params: &ParamVector, row: &[f64]) -> usize {
        let logits = self.logits(params, row);
        // first maximum wins
        let mut best = 0;
        for (k, &z) in logits.iter().enumerate() {
            if z > logits[best] {
                best = k;
            }
        }
        best
    }

    fn accuracy(&self, params: &ParamVector, batch: &Batch) -> Result<f64> {
        check_params(self.param_dim(), params)?;
        check_batch(self.n_features(), self.n_classes(), batch)?;
        let correct = (0..batch.len())
            .filter(|&i| self.predict(params, batch.row(i)) == batch.labels()[i])
            .count();
        Ok(correct as f64 / batch.len() as f64)
    }
}

pub(crate) fn check_params(param_dim: usize, params: &ParamVector) -> Result<()> {
    if params.dim() != param_dim {
        return Err(Error::DimensionMismatch {
            expected: param_dim,
            found: params.dim(),
        });
    }
    Ok(())
}

pub(crate) fn check_batch(n_features: usize, n_classes: usize, batch: &Batch) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if batch.n_features() != n_features {
        return Err(Error::DimensionMismatch {
            expected: n_features,
            found: batch.n_features(),
        });
    }
    if let Some(&bad) = batch.labels().iter().find(|&&y| y >= n_classes) {
        return Err(Error::invalid(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }
    Ok(())
}
