use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::rng_from_seed;
use crate::error::{Error, Result};
use crate::objective::{make_two_minima_landscape, Batch, TwoWells};
use crate::optim::{rule_gradient, HyperParams, Rule};
use crate::param::ParamVector;

const GRID_POINTS: usize = 20_001;
const BALL_SAMPLES: usize = 4_000;

/// Two-well landscape and the gradient-descent settings used to compare
/// where each rule ends up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeConfig {
    pub centers: [f64; 2],
    pub depths: [f64; 2],
    pub widths: [f64; 2],
    pub rho: f64,
    pub alpha: f64,
    pub lr: f64,
    pub iterations: usize,
    pub n_inits: usize,
    pub init_range: [f64; 2],
    pub seed: u64,
    /// Require the sharp minimum to have the lower perturbed loss and the
    /// larger surrogate gap (checked only for `rho > 0`).
    pub check_ordering: bool,
}

impl Default for LandscapeConfig {
    /// A deep narrow well at −1 next to a shallower wide one at +1.
    fn default() -> Self {
        Self {
            centers: [-1.0, 1.0],
            depths: [1.0, 0.4],
            widths: [0.08, 0.8],
            rho: 0.1,
            alpha: 0.001,
            lr: 0.05,
            iterations: 2000,
            n_inits: 200,
            init_range: [-2.0, 2.0],
            seed: 0,
            check_ordering: true,
        }
    }
}

impl LandscapeConfig {
    /// Two identical wells; neither is sharper.
    pub fn symmetric() -> Self {
        Self {
            depths: [1.0, 1.0],
            widths: [0.3, 0.3],
            check_ordering: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimumReport {
    pub theta: f64,
    pub loss: f64,
    /// `max L` over `[θ − ρ, θ + ρ]`.
    pub perturbed_loss: f64,
    pub gap: f64,
    pub curvature: f64,
}

/// Share of initializations that finish nearest each minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinFractions {
    pub rule: Rule,
    /// In the order of [`LandscapeReport::minima`].
    pub fractions: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeReport {
    pub config: LandscapeConfig,
    /// Sorted by position.
    pub minima: [MinimumReport; 2],
    /// Index of the minimum with the larger curvature.
    pub sharp: usize,
    pub basins: Vec<BasinFractions>,
}

impl LandscapeReport {
    pub fn flat(&self) -> usize {
        1 - self.sharp
    }

    /// Fraction of `rule`'s runs that ended in the flat basin.
    pub fn flat_fraction(&self, rule: Rule) -> Option<f64> {
        self.basins
            .iter()
            .find(|b| b.rule == rule)
            .map(|b| b.fractions[self.flat()])
    }

    /// Sharp minimum has lower perturbed loss yet larger surrogate gap.
    pub fn ordering_holds(&self) -> bool {
        let (s, f) = (&self.minima[self.sharp], &self.minima[self.flat()]);
        s.perturbed_loss < f.perturbed_loss && s.gap > f.gap
    }
}

impl fmt::Display for LandscapeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rho = {}", self.config.rho)?;
        writeln!(
            f,
            "{:<6} {:>10} {:>10} {:>12} {:>10} {:>10}",
            "min", "theta", "loss", "perturbed", "gap", "curv"
        )?;
        for (i, m) in self.minima.iter().enumerate() {
            let tag = if i == self.sharp { "sharp" } else { "flat" };
            writeln!(
                f,
                "{tag:<6} {:>10.5} {:>10.5} {:>12.5} {:>10.5} {:>10.3}",
                m.theta, m.loss, m.perturbed_loss, m.gap, m.curvature
            )?;
        }
        writeln!(f, "{:<8} {:>8} {:>8}", "rule", "sharp", "flat")?;
        for b in &self.basins {
            writeln!(
                f,
                "{:<8} {:>8.3} {:>8.3}",
                b.rule.name(),
                b.fractions[self.sharp],
                b.fractions[self.flat()]
            )?;
        }
        Ok(())
    }
}

fn locate_minima(wells: &TwoWells) -> Result<[f64; 2]> {
    let c = wells.centers();
    let w = wells.widths();
    let pad = 4.0 * w[0].max(w[1]);
    let (lo, hi) = (c[0].min(c[1]) - pad, c[0].max(c[1]) + pad);
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let values: Vec<f64> = (0..GRID_POINTS)
        .map(|i| wells.value(lo + i as f64 * step))
        .collect();
    let mut found = Vec::new();
    for i in 1..GRID_POINTS - 1 {
        if values[i] < values[i - 1] && values[i] <= values[i + 1] {
            found.push(refine(wells, lo + i as f64 * step, step));
        }
    }
    if found.len() != 2 {
        return Err(Error::invalid(format!(
            "landscape has {} local minima, expected 2",
            found.len()
        )));
    }
    Ok([found[0], found[1]])
}

/// Newton on the derivative, confined to one grid cell around `x0`.
fn refine(wells: &TwoWells, x0: f64, step: f64) -> f64 {
    let mut x = x0;
    for _ in 0..100 {
        let h = wells.second_derivative(x);
        if h <= 0.0 {
            break;
        }
        let dx = wells.derivative(x) / h;
        x = (x - dx).clamp(x0 - step, x0 + step);
        if dx.abs() < 1e-15 {
            break;
        }
    }
    x
}

fn ball_max(wells: &TwoWells, theta: f64, rho: f64) -> f64 {
    (0..=BALL_SAMPLES)
        .map(|k| wells.value(theta + rho * (2.0 * k as f64 / BALL_SAMPLES as f64 - 1.0)))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn descend(
    wells: &TwoWells,
    rule: Rule,
    x0: f64,
    hp: &HyperParams,
    iterations: usize,
) -> Result<f64> {
    let empty = Batch::empty();
    let mut theta = ParamVector::new(vec![x0])?;
    for _ in 0..iterations {
        let (g, _) = rule_gradient(rule, wells, &theta, &empty, hp)?;
        theta = theta.axpy(-hp.lr, &g)?;
    }
    Ok(theta[0])
}

/// Locates both minima, reports their losses, ρ-ball maxima and gaps, then
/// runs plain gradient descent with ERM, SAM and SAGM from the same seeded
/// initializations and counts which basin each run ends in.
pub fn landscape_demo(cfg: &LandscapeConfig) -> Result<LandscapeReport> {
    if !(cfg.rho.is_finite() && cfg.rho >= 0.0) {
        return Err(Error::invalid("rho must be finite and >= 0"));
    }
    if !(cfg.lr.is_finite() && cfg.lr > 0.0) {
        return Err(Error::invalid("lr must be positive"));
    }
    if cfg.n_inits == 0
        || cfg.init_range[0] >= cfg.init_range[1]
        || cfg.init_range.iter().any(|v| !v.is_finite())
    {
        return Err(Error::invalid(
            "need at least one init and a non-empty init range",
        ));
    }
    let wells = make_two_minima_landscape(&cfg.centers, &cfg.depths, &cfg.widths)?;
    let xs = locate_minima(&wells)?;
    let minima = xs.map(|x| {
        let loss = wells.value(x);
        let perturbed_loss = ball_max(&wells, x, cfg.rho);
        MinimumReport {
            theta: x,
            loss,
            perturbed_loss,
            gap: perturbed_loss - loss,
            curvature: wells.second_derivative(x),
        }
    });
    let sharp = usize::from(minima[1].curvature > minima[0].curvature);

    let mut rng = rng_from_seed(cfg.seed);
    let inits: Vec<f64> = (0..cfg.n_inits)
        .map(|_| rng.random_range(cfg.init_range[0]..cfg.init_range[1]))
        .collect();
    let hp = HyperParams {
        rho: cfg.rho,
        alpha: cfg.alpha,
        lr: cfg.lr,
        ..HyperParams::default()
    };
    let mut basins = Vec::new();
    for rule in [Rule::Erm, Rule::Sam, Rule::Sagm] {
        let finals = inits
            .par_iter()
            .map(|&x0| descend(&wells, rule, x0, &hp, cfg.iterations))
            .collect::<Result<Vec<f64>>>()?;
        let near_second = finals
            .iter()
            .filter(|&&x| (x - xs[1]).abs() < (x - xs[0]).abs())
            .count() as f64
            / finals.len() as f64;
        basins.push(BasinFractions {
            rule,
            fractions: [1.0 - near_second, near_second],
        });
    }

    let report = LandscapeReport {
        config: cfg.clone(),
        minima,
        sharp,
        basins,
    };
    if cfg.check_ordering && cfg.rho > 0.0 && !report.ordering_holds() {
        return Err(Error::invalid(
            "landscape fixture violates the expected ordering of perturbed loss and gap",
        ));
    }
    Ok(report)
}
