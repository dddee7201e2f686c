//! Flat parameter vectors.
//!
//! Every model in the crate stores its weights in a single [`ParamVector`];
//! layer structure is only an indexing scheme over it. All arithmetic is
//! dimension-checked and every returned vector is verified finite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ParamVector {
    values: Vec<f64>,
}

fn check_finite(values: &[f64], context: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid(
                "parameter vector must have positive dimension",
            ));
        }
        check_finite(&values, "ParamVector::new")?;
        Ok(Self { values })
    }

    /// Zero vector. Panics if `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "parameter vector must have positive dimension");
        Self {
            values: vec![0.0; dim],
        }
    }

    /// Unit basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut v = Self::zeros(dim);
        v.values[index] = 1.0;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    fn check_dim(&self, other: &ParamVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    fn from_checked(values: Vec<f64>, context: &'static str) -> Result<Self> {
        check_finite(&values, context)?;
        Ok(Self { values })
    }

    pub fn add(&self, other: &ParamVector) -> Result<Self> {
        self.check_dim(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Self::from_checked(values, "ParamVector::add")
    }

    pub fn sub(&self, other: &ParamVector) -> Result<Self> {
        self.check_dim(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_checked(values, "ParamVector::sub")
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        let values = self.values.iter().map(|a| a * factor).collect();
        Self::from_checked(values, "ParamVector::scale")
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &ParamVector) -> Result<Self> {
        self.check_dim(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + factor * b)
            .collect();
        Self::from_checked(values, "ParamVector::axpy")
    }

    pub fn dot(&self, other: &ParamVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Global L2 norm over every coordinate.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }
}

impl TryFrom<Vec<f64>> for ParamVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ParamVector> for Vec<f64> {
    fn from(p: ParamVector) -> Self {
        p.values
    }
}

impl std::ops::Index<usize> for ParamVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.values[index]
    }
}
