use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// GSAM's ascent scale when none is configured.
pub const DEFAULT_GSAM_BETA: f64 = 0.4;

/// Which effective gradient a training step descends along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Erm,
    Sam,
    Gsam,
    ErmSam,
    Sagm,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::Erm, Rule::Sam, Rule::Gsam, Rule::ErmSam, Rule::Sagm];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Erm => "erm",
            Rule::Sam => "sam",
            Rule::Gsam => "gsam",
            Rule::ErmSam => "erm_sam",
            Rule::Sagm => "sagm",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown optimizer rule `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParams {
    /// Perturbation radius.
    pub rho: f64,
    /// SAGM coefficient on the gradient-matching shift.
    pub alpha: f64,
    /// GSAM ascent scale.
    pub beta: f64,
    pub lr: f64,
    pub weight_decay: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            rho: 0.05,
            alpha: 0.001,
            beta: DEFAULT_GSAM_BETA,
            lr: 1e-3,
            weight_decay: 0.0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("rho", self.rho),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("weight_decay", self.weight_decay),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Config(format!("lr must be > 0, got {}", self.lr)));
        }
        for (name, v) in [
            ("adam_beta1", self.adam_beta1),
            ("adam_beta2", self.adam_beta2),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if !(self.adam_eps.is_finite() && self.adam_eps > 0.0) {
            return Err(Error::Config(format!(
                "adam_eps must be > 0, got {}",
                self.adam_eps
            )));
        }
        Ok(())
    }
}
