use std::sync::atomic::{AtomicUsize, Ordering};

use super::{Batch, Objective, ObjectiveKind};
use crate::error::Result;
use crate::param::ParamVector;

/// Number of loss and gradient evaluations seen by a [`CountingObjective`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CallCounts {
    pub loss: usize,
    pub grad: usize,
}

/// Wraps an objective and counts evaluations. A fused `value_and_grad`
/// call counts as one loss and one gradient evaluation.
#[derive(Debug, Default)]
pub struct CountingObjective<O> {
    inner: O,
    loss_calls: AtomicUsize,
    grad_calls: AtomicUsize,
}

impl<O: Objective> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            loss_calls: AtomicUsize::new(0),
            grad_calls: AtomicUsize::new(0),
        }
    }

    pub fn counts(&self) -> CallCounts {
        CallCounts {
            loss: self.loss_calls.load(Ordering::SeqCst),
            grad: self.grad_calls.load(Ordering::SeqCst),
        }
    }

    pub fn reset(&self) {
        self.loss_calls.store(0, Ordering::SeqCst);
        self.grad_calls.store(0, Ordering::SeqCst);
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: Objective> Objective for CountingObjective<O> {
    fn kind(&self) -> ObjectiveKind {
        self.inner.kind()
    }

    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }

    fn loss(&self, params: &ParamVector, batch: &Batch) -> Result<f64> {
        self.loss_calls.fetch_add(1, Ordering::SeqCst);
        self.inner.loss(params, batch)
    }

    fn grad(&self, params: &ParamVector, batch: &Batch) -> Result<ParamVector> {
        self.grad_calls.fetch_add(1, Ordering::SeqCst);
        self.inner.grad(params, batch)
    }

    fn value_and_grad(&self, params: &ParamVector, batch: &Batch) -> Result<(f64, ParamVector)> {
        self.loss_calls.fetch_add(1, Ordering::SeqCst);
        self.grad_calls.fetch_add(1, Ordering::SeqCst);
        self.inner.value_and_grad(params, batch)
    }

    fn as_quadratic(&self) -> Option<&super::Quadratic> {
        self.inner.as_quadratic()
    }
}
