use super::xent::{softmax_xent, xent};
use super::{check_batch, check_params, Batch, Classifier, Objective, ObjectiveKind};
use crate::error::{Error, Result};
use crate::param::ParamVector;

/// Multinomial logistic regression. Layout: `W` (classes × features,
/// row-major) followed by the bias vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogReg {
    n_features: usize,
    n_classes: usize,
}

pub fn make_logreg(n_features: usize, n_classes: usize) -> Result<LogReg> {
    if n_features == 0 || n_classes < 2 {
        return Err(Error::invalid(
            "logistic regression needs at least one feature and two classes",
        ));
    }
    Ok(LogReg {
        n_features,
        n_classes,
    })
}

impl LogReg {
    fn logits_into(&self, params: &[f64], row: &[f64], out: &mut [f64]) {
        let f = self.n_features;
        let bias = &params[self.n_classes * f..];
        for (k, z) in out.iter_mut().enumerate() {
            let w = &params[k * f..(k + 1) * f];
            *z = bias[k] + w.iter().zip(row).map(|(a, x)| a * x).sum::<f64>();
        }
    }
}

impl Objective for LogReg {
    fn kind(&self) -> ObjectiveKind {
        ObjectiveKind::LogisticRegression
    }

    fn param_dim(&self) -> usize {
        self.n_features * self.n_classes + self.n_classes
    }

    fn loss(&self, params: &ParamVector, batch: &Batch) -> Result<f64> {
        check_params(self.param_dim(), params)?;
        check_batch(self.n_features, self.n_classes, batch)?;
        let mut z = vec![0.0; self.n_classes];
        let mut total = 0.0;
        for i in 0..batch.len() {
            self.logits_into(params.as_slice(), batch.row(i), &mut z);
            total += xent(&z, batch.labels()[i]);
        }
        Ok(total / batch.len() as f64)
    }

    fn grad(&self, params: &ParamVector, batch: &Batch) -> Result<ParamVector> {
        Ok(self.value_and_grad(params, batch)?.1)
    }

    fn value_and_grad(&self, params: &ParamVector, batch: &Batch) -> Result<(f64, ParamVector)> {
        check_params(self.param_dim(), params)?;
        check_batch(self.n_features, self.n_classes, batch)?;
        let (f, c) = (self.n_features, self.n_classes);
        let mut z = vec![0.0; c];
        let mut dz = vec![0.0; c];
        let mut g = vec![0.0; self.param_dim()];
        let mut total = 0.0;
        for i in 0..batch.len() {
            let row = batch.row(i);
            self.logits_into(params.as_slice(), row, &mut z);
            total += softmax_xent(&z, batch.labels()[i], &mut dz);
            for k in 0..c {
                for (gj, x) in g[k * f..(k + 1) * f].iter_mut().zip(row) {
                    *gj += dz[k] * x;
                }
                g[c * f + k] += dz[k];
            }
        }
        let n = batch.len() as f64;
        g.iter_mut().for_each(|v| *v /= n);
        Ok((total / n, ParamVector::new(g)?))
    }
}

impl Classifier for LogReg {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn logits(&self, params: &ParamVector, row: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.n_classes];
        self.logits_into(params.as_slice(), row, &mut z);
        z
    }

    /// All zeros: the uniform-softmax starting point.
    fn initial_params(&self) -> ParamVector {
        ParamVector::zeros(self.param_dim())
    }
}
