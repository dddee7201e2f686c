use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of labeled examples, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    n_features: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    domain_ids: Vec<usize>,
}

impl Batch {
    pub fn new(
        n_features: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
        domain_ids: Vec<usize>,
    ) -> Result<Self> {
        let rows = labels.len();
        if domain_ids.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: domain_ids.len(),
            });
        }
        if features.len() != rows * n_features {
            return Err(Error::DimensionMismatch {
                expected: rows * n_features,
                found: features.len(),
            });
        }
        if rows > 0 && n_features == 0 {
            return Err(Error::invalid("non-empty batch needs at least one feature"));
        }
        if !features.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "Batch::new",
            });
        }
        Ok(Self {
            n_features,
            features,
            labels,
            domain_ids,
        })
    }

    /// The batch analytic objectives are evaluated on.
    pub fn empty() -> Self {
        Self {
            n_features: 0,
            features: Vec::new(),
            labels: Vec::new(),
            domain_ids: Vec::new(),
        }
    }

    /// Concatenates batches with the same feature width, preserving order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Batch>) -> Result<Self> {
        let mut out: Option<Batch> = None;
        for part in parts {
            match out.as_mut() {
                None => out = Some(part.clone()),
                Some(acc) => {
                    if acc.n_features != part.n_features {
                        return Err(Error::DimensionMismatch {
                            expected: acc.n_features,
                            found: part.n_features,
                        });
                    }
                    acc.features.extend_from_slice(&part.features);
                    acc.labels.extend_from_slice(&part.labels);
                    acc.domain_ids.extend_from_slice(&part.domain_ids);
                }
            }
        }
        Ok(out.unwrap_or_else(Batch::empty))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn domain_ids(&self) -> &[usize] {
        &self.domain_ids
    }

    /// Sub-batch made of the given row indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        let mut domain_ids = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
            domain_ids.push(self.domain_ids[i]);
        }
        Self {
            n_features: self.n_features,
            features,
            labels,
            domain_ids,
        }
    }
}
