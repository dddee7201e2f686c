use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::xent::{softmax_xent, xent};
use super::{check_batch, check_params, Batch, Classifier, Objective, ObjectiveKind};
use crate::error::{Error, Result};
use crate::param::ParamVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Fully connected classifier with a cross-entropy head.
///
/// Each layer contributes its weight matrix (out × in, row-major) followed by
/// its bias to the flat parameter vector. The activation is applied to every
/// hidden layer, never to the logits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mlp {
    layer_sizes: Vec<usize>,
    activation: Activation,
    seed: u64,
    // start offset of each layer's block in θ
    offsets: Vec<usize>,
    param_dim: usize,
}

pub fn make_mlp(layer_sizes: &[usize], activation: Activation, seed: u64) -> Result<Mlp> {
    if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
        return Err(Error::invalid(
            "mlp needs at least an input and an output layer, all of positive size",
        ));
    }
    if *layer_sizes.last().unwrap() < 2 {
        return Err(Error::invalid(
            "mlp output layer needs at least two classes",
        ));
    }
    let mut offsets = Vec::with_capacity(layer_sizes.len() - 1);
    let mut dim = 0;
    for w in layer_sizes.windows(2) {
        offsets.push(dim);
        dim += w[0] * w[1] + w[1];
    }
    Ok(Mlp {
        layer_sizes: layer_sizes.to_vec(),
        activation,
        seed,
        offsets,
        param_dim: dim,
    })
}

impl Mlp {
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    fn n_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// Forward pass; returns the output of every layer, inputs first.
    fn forward(&self, params: &[f64], row: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layer_sizes.len());
        acts.push(row.to_vec());
        for l in 0..self.n_layers() {
            let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let w = &params[self.offsets[l]..self.offsets[l] + fan_in * fan_out];
            let b = &params[self.offsets[l] + fan_in * fan_out..][..fan_out];
            let input = &acts[l];
            let hidden = l + 1 < self.n_layers();
            let out: Vec<f64> = (0..fan_out)
                .map(|j| {
                    let z = b[j]
                        + w[j * fan_in..(j + 1) * fan_in]
                            .iter()
                            .zip(input)
                            .map(|(a, x)| a * x)
                            .sum::<f64>();
                    if hidden {
                        self.activation.apply(z)
                    } else {
                        z
                    }
                })
                .collect();
            acts.push(out);
        }
        acts
    }
}

impl Objective for Mlp {
    fn kind(&self) -> ObjectiveKind {
        ObjectiveKind::Mlp
    }

    fn param_dim(&self) -> usize {
        self.param_dim
    }

    fn loss(&self, params: &ParamVector, batch: &Batch) -> Result<f64> {
        check_params(self.param_dim, params)?;
        check_batch(self.n_features(), self.n_classes(), batch)?;
        let total: f64 = (0..batch.len())
            .map(|i| {
                let acts = self.forward(params.as_slice(), batch.row(i));
                xent(acts.last().unwrap(), batch.labels()[i])
            })
            .sum();
        Ok(total / batch.len() as f64)
    }

    fn grad(&self, params: &ParamVector, batch: &Batch) -> Result<ParamVector> {
        Ok(self.value_and_grad(params, batch)?.1)
    }

    fn value_and_grad(&self, params: &ParamVector, batch: &Batch) -> Result<(f64, ParamVector)> {
        check_params(self.param_dim, params)?;
        check_batch(self.n_features(), self.n_classes(), batch)?;
        let theta = params.as_slice();
        let mut g = vec![0.0; self.param_dim];
        let mut total = 0.0;
        for i in 0..batch.len() {
            let acts = self.forward(theta, batch.row(i));
            let logits = acts.last().unwrap();
            let mut delta = vec![0.0; logits.len()];
            total += softmax_xent(logits, batch.labels()[i], &mut delta);
            for l in (0..self.n_layers()).rev() {
                let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
                let off = self.offsets[l];
                let input = &acts[l];
                for j in 0..fan_out {
                    let row = &mut g[off + j * fan_in..off + (j + 1) * fan_in];
                    for (gw, x) in row.iter_mut().zip(input) {
                        *gw += delta[j] * x;
                    }
                    g[off + fan_in * fan_out + j] += delta[j];
                }
                if l > 0 {
                    let w = &theta[off..off + fan_in * fan_out];
                    delta = (0..fan_in)
                        .map(|k| {
                            let back: f64 =
                                (0..fan_out).map(|j| w[j * fan_in + k] * delta[j]).sum();
                            back * self.activation.derivative_from_output(input[k])
                        })
                        .collect();
                }
            }
        }
        let n = batch.len() as f64;
        g.iter_mut().for_each(|v| *v /= n);
        Ok((total / n, ParamVector::new(g)?))
    }
}

impl Classifier for Mlp {
    fn n_features(&self) -> usize {
        self.layer_sizes[0]
    }

    fn n_classes(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    fn logits(&self, params: &ParamVector, row: &[f64]) -> Vec<f64> {
        self.forward(params.as_slice(), row).pop().unwrap()
    }

    /// Uniform in `[−1/√fan_in, 1/√fan_in]` for weights and biases, drawn from
    /// a ChaCha8 stream seeded with the construction seed.
    fn initial_params(&self) -> ParamVector {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut values = Vec::with_capacity(self.param_dim);
        for w in self.layer_sizes.windows(2) {
            let bound = 1.0 / (w[0] as f64).sqrt();
            for _ in 0..(w[0] * w[1] + w[1]) {
                values.push(rng.random_range(-bound..=bound));
            }
        }
        ParamVector::new(values).expect("bounded init is finite")
    }
}
