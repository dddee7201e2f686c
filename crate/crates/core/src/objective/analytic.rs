//! Closed-form landscapes. These ignore the batch entirely.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_params, Batch, Objective, ObjectiveKind};
use crate::error::{Error, Result};
use crate::param::ParamVector;

/// `L(θ) = ½ Σ λ_i (u_i·θ)²` for an orthonormal basis `u` (the standard
/// basis unless the quadratic was built with [`Quadratic::rotated`]).
#[derive(Debug, Clone)]
pub struct Quadratic {
    eigenvalues: Vec<f64>,
    // row i is the eigenvector for eigenvalues[i]
    basis: Option<Vec<f64>>,
}

fn validate_spectrum(eigenvalues: &[f64]) -> Result<()> {
    if eigenvalues.is_empty() {
        return Err(Error::invalid("quadratic needs at least one eigenvalue"));
    }
    if !eigenvalues.iter().all(|l| l.is_finite()) {
        return Err(Error::NonFinite {
            context: "quadratic eigenvalues",
        });
    }
    if !eigenvalues.iter().any(|&l| l > 0.0) {
        return Err(Error::invalid(
            "quadratic needs at least one positive eigenvalue",
        ));
    }
    Ok(())
}

/// Diagonal quadratic `½ θᵀ diag(eigenvalues) θ`.
pub fn make_quadratic(eigenvalues: &[f64]) -> Result<Quadratic> {
    validate_spectrum(eigenvalues)?;
    Ok(Quadratic {
        eigenvalues: eigenvalues.to_vec(),
        basis: None,
    })
}

impl Quadratic {
    /// Quadratic with the given spectrum in a seeded random orthonormal basis.
    pub fn rotated(eigenvalues: &[f64], seed: u64) -> Result<Self> {
        validate_spectrum(eigenvalues)?;
        let n = eigenvalues.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut basis: Vec<f64> = Vec::with_capacity(n * n);
        while basis.len() < n * n {
            let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            // modified Gram-Schmidt against the rows accepted so far
            for row in basis.chunks(n) {
                let proj: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= proj * r;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            basis.extend(v.iter().map(|x| x / norm));
        }
        Ok(Self {
            eigenvalues: eigenvalues.to_vec(),
            basis: Some(basis),
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Unit eigenvector belonging to `eigenvalues()[index]`.
    pub fn eigenvector(&self, index: usize) -> Result<ParamVector> {
        let n = self.eigenvalues.len();
        match &self.basis {
            None => ParamVector::basis(n, index),
            Some(b) => {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, len: n });
                }
                ParamVector::new(b[index * n..(index + 1) * n].to_vec())
            }
        }
    }

    fn coordinates(&self, params: &ParamVector) -> Vec<f64> {
        let n = self.eigenvalues.len();
        match &self.basis {
            None => params.as_slice().to_vec(),
            Some(b) => b
                .chunks(n)
                .map(|row| row.iter().zip(params.as_slice()).map(|(a, x)| a * x).sum())
                .collect(),
        }
    }
}

impl Objective for Quadratic {
    fn kind(&self) -> ObjectiveKind {
        ObjectiveKind::Quadratic
    }

    fn param_dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn loss(&self, params: &ParamVector, _batch: &Batch) -> Result<f64> {
        check_params(self.param_dim(), params)?;
        let c = self.coordinates(params);
        Ok(0.5
            * self
                .eigenvalues
                .iter()
                .zip(&c)
                .map(|(l, x)| l * x * x)
                .sum::<f64>())
    }

    fn grad(&self, params: &ParamVector, _batch: &Batch) -> Result<ParamVector> {
        check_params(self.param_dim(), params)?;
        let n = self.eigenvalues.len();
        match &self.basis {
            None => ParamVector::new(
                self.eigenvalues
                    .iter()
                    .zip(params.as_slice())
                    .map(|(l, x)| l * x)
                    .collect(),
            ),
            Some(b) => {
                let c = self.coordinates(params);
                let mut g = vec![0.0; n];
                for ((row, l), ci) in b.chunks(n).zip(&self.eigenvalues).zip(&c) {
                    for (gj, uj) in g.iter_mut().zip(row) {
                        *gj += l * ci * uj;
                    }
                }
                ParamVector::new(g)
            }
        }
    }

    fn as_quadratic(&self) -> Option<&Quadratic> {
        Some(self)
    }
}

/// One-dimensional landscape with two Gaussian wells:
/// `L(θ) = c − Σ depth_i · exp(−(θ − center_i)² / (2 width_i²))`
/// with `c = Σ depth_i`, so the loss is never negative.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoWells {
    centers: [f64; 2],
    depths: [f64; 2],
    widths: [f64; 2],
    offset: f64,
}

pub fn make_two_minima_landscape(
    centers: &[f64],
    depths: &[f64],
    widths: &[f64],
) -> Result<TwoWells> {
    if centers.len() != 2 || depths.len() != 2 || widths.len() != 2 {
        return Err(Error::invalid(format!(
            "two-minima landscape needs exactly two wells, got {} centers, {} depths, {} widths",
            centers.len(),
            depths.len(),
            widths.len()
        )));
    }
    let all = centers.iter().chain(depths).chain(widths);
    if !all.clone().all(|v| v.is_finite()) {
        return Err(Error::NonFinite {
            context: "two-minima landscape",
        });
    }
    if widths.iter().any(|&w| w <= 0.0) {
        return Err(Error::invalid("well widths must be positive"));
    }
    if depths.iter().any(|&d| d <= 0.0) {
        return Err(Error::invalid("well depths must be positive"));
    }
    Ok(TwoWells {
        centers: [centers[0], centers[1]],
        depths: [depths[0], depths[1]],
        widths: [widths[0], widths[1]],
        offset: depths[0] + depths[1],
    })
}

impl TwoWells {
    pub fn centers(&self) -> [f64; 2] {
        self.centers
    }

    pub fn depths(&self) -> [f64; 2] {
        self.depths
    }

    pub fn widths(&self) -> [f64; 2] {
        self.widths
    }

    pub fn value(&self, x: f64) -> f64 {
        let mut v = self.offset;
        for i in 0..2 {
            let d = x - self.centers[i];
            v -= self.depths[i] * (-d * d / (2.0 * self.widths[i] * self.widths[i])).exp();
        }
        v
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let mut g = 0.0;
        for i in 0..2 {
            let d = x - self.centers[i];
            let w2 = self.widths[i] * self.widths[i];
            g += self.depths[i] * d / w2 * (-d * d / (2.0 * w2)).exp();
        }
        g
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let mut h = 0.0;
        for i in 0..2 {
            let d = x - self.centers[i];
            let w2 = self.widths[i] * self.widths[i];
            h += self.depths[i] / w2 * (1.0 - d * d / w2) * (-d * d / (2.0 * w2)).exp();
        }
        h
    }
}

impl Objective for TwoWells {
    fn kind(&self) -> ObjectiveKind {
        ObjectiveKind::Analytic1d
    }

    fn param_dim(&self) -> usize {
        1
    }

    fn loss(&self, params: &ParamVector, _batch: &Batch) -> Result<f64> {
        check_params(1, params)?;
        Ok(self.value(params[0]))
    }

    fn grad(&self, params: &ParamVector, _batch: &Batch) -> Result<ParamVector> {
        check_params(1, params)?;
        ParamVector::new(vec![self.derivative(params[0])])
    }
}

/// `L(x, y) = (a − x)² + b (y − x²)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rosenbrock {
    a: f64,
    b: f64,
}

pub fn make_rosenbrock(a: f64, b: f64) -> Result<Rosenbrock> {
    if !(a.is_finite() && b.is_finite()) || b <= 0.0 {
        return Err(Error::invalid("rosenbrock needs finite a and positive b"));
    }
    Ok(Rosenbrock { a, b })
}

impl Objective for Rosenbrock {
    fn kind(&self) -> ObjectiveKind {
        ObjectiveKind::Analytic2d
    }

    fn param_dim(&self) -> usize {
        2
    }

    fn loss(&self, params: &ParamVector, _batch: &Batch) -> Result<f64> {
        check_params(2, params)?;
        let (x, y) = (params[0], params[1]);
        Ok((self.a - x).powi(2) + self.b * (y - x * x).powi(2))
    }

    fn grad(&self, params: &ParamVector, _batch: &Batch) -> Result<ParamVector> {
        check_params(2, params)?;
        let (x, y) = (params[0], params[1]);
        let r = y - x * x;
        ParamVector::new(vec![
            -2.0 * (self.a - x) - 4.0 * self.b * x * r,
            2.0 * self.b * r,
        ])
    }
}

/// Flat landscape; useful as a degenerate-gradient fixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant {
    pub value: f64,
    pub dim: usize,
}

impl Objective for Constant {
    fn kind(&self) -> ObjectiveKind {
        if self.dim == 1 {
            ObjectiveKind::Analytic1d
        } else {
            ObjectiveKind::Analytic2d
        }
    }

    fn param_dim(&self) -> usize {
        self.dim
    }

    fn loss(&self, params: &ParamVector, _batch: &Batch) -> Result<f64> {
        check_params(self.dim, params)?;
        Ok(self.value)
    }

    fn grad(&self, params: &ParamVector, _batch: &Batch) -> Result<ParamVector> {
        check_params(self.dim, params)?;
        Ok(ParamVector::zeros(self.dim))
    }
}
