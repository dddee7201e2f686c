use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Batch;

/// One domain's labeled examples. Every row carries the domain's id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    id: usize,
    examples: Batch,
}

impl Domain {
    pub fn new(
        id: usize,
        n_features: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        let n = labels.len();
        let examples = Batch::new(n_features, features, labels, vec![id; n])?;
        Ok(Self { id, examples })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &Batch {
        &self.examples
    }

    pub(crate) fn subset(&self, indices: &[usize]) -> Self {
        Self {
            id: self.id,
            examples: self.examples.select(indices),
        }
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    pub angle_step_degrees: Option<f64>,
    pub noise_std: Option<f64>,
}

impl Provenance {
    pub fn named(generator: impl Into<String>) -> Self {
        Self {
            generator: generator.into(),
            seed: None,
            angle_step_degrees: None,
            noise_std: None,
        }
    }
}

/// Labeled examples partitioned into domains with a shared label space and
/// feature width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiDomainDataset {
    domains: Vec<Domain>,
    n_classes: usize,
    n_features: usize,
    provenance: Provenance,
}

impl MultiDomainDataset {
    /// Needs at least one domain; generators and the leave-one-out split
    /// additionally require two.
    pub fn new(domains: Vec<Domain>, n_classes: usize, provenance: Provenance) -> Result<Self> {
        let first = domains
            .first()
            .ok_or_else(|| Error::invalid("dataset needs at least one domain"))?;
        let n_features = first.examples().n_features();
        for d in &domains {
            if d.is_empty() {
                return Err(Error::invalid(format!("domain {} is empty", d.id())));
            }
            if d.examples().n_features() != n_features {
                return Err(Error::DimensionMismatch {
                    expected: n_features,
                    found: d.examples().n_features(),
                });
            }
            if let Some(&y) = d.examples().labels().iter().find(|&&y| y >= n_classes) {
                return Err(Error::invalid(format!(
                    "label {y} in domain {} out of range for {n_classes} classes",
                    d.id()
                )));
            }
        }
        Ok(Self {
            domains,
            n_classes,
            n_features,
            provenance,
        })
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn n_domains(&self) -> usize {
        self.domains.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.domains.iter().map(Domain::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All examples as one batch, domains in order.
    pub fn pooled(&self) -> Batch {
        Batch::concat(self.domains.iter().map(Domain::examples)).expect("widths validated")
    }

    pub(crate) fn with_domains(&self, domains: Vec<Domain>) -> Self {
        Self {
            domains,
            n_classes: self.n_classes,
            n_features: self.n_features,
            provenance: self.provenance.clone(),
        }
    }
}
