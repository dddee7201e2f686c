use super::config::ObjectiveSpec;
use crate::error::Result;
use crate::objective::{
    make_logreg, make_mlp, Batch, Classifier, LogReg, Mlp, Objective, ObjectiveKind,
};
use crate::param::ParamVector;

/// A configured classifier.
#[derive(Debug, Clone)]
pub enum Model {
    LogReg(LogReg),
    Mlp(Mlp),
}

impl Model {
    /// Builds the classifier for `spec`; `seed` drives MLP initialization.
    pub fn build(
        spec: &ObjectiveSpec,
        n_features: usize,
        n_classes: usize,
        seed: u64,
    ) -> Result<Self> {
        Ok(match spec {
            ObjectiveSpec::Logreg => Model::LogReg(make_logreg(n_features, n_classes)?),
            ObjectiveSpec::Mlp { hidden, activation } => {
                let mut sizes = Vec::with_capacity(hidden.len() + 2);
                sizes.push(n_features);
                sizes.extend_from_slice(hidden);
                sizes.push(n_classes);
                Model::Mlp(make_mlp(&sizes, *activation, seed)?)
            }
        })
    }

    fn inner(&self) -> &dyn Classifier {
        match self {
            Model::LogReg(m) => m,
            Model::Mlp(m) => m,
        }
    }
}

impl Objective for Model {
    fn kind(&self) -> ObjectiveKind {
        self.inner().kind()
    }

    fn param_dim(&self) -> usize {
        self.inner().param_dim()
    }

    fn loss(&self, params: &ParamVector, batch: &Batch) -> Result<f64> {
        self.inner().loss(params, batch)
    }

    fn grad(&self, params: &ParamVector, batch: &Batch) -> Result<ParamVector> {
        self.inner().grad(params, batch)
    }

    fn value_and_grad(&self, params: &ParamVector, batch: &Batch) -> Result<(f64, ParamVector)> {
        self.inner().value_and_grad(params, batch)
    }
}

impl Classifier for Model {
    fn n_features(&self) -> usize {
        self.inner().n_features()
    }

    fn n_classes(&self) -> usize {
        self.inner().n_classes()
    }

    fn logits(&self, params: &ParamVector, row: &[f64]) -> Vec<f64> {
        self.inner().logits(params, row)
    }

    fn initial_params(&self) -> ParamVector {
        self.inner().initial_params()
    }

    fn predict(&self, params: &ParamVector, row: &[f64]) -> usize {
        self.inner().predict(params, row)
    }
}
