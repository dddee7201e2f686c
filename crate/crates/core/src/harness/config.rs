use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Activation;
use crate::optim::{HyperParams, Rule, DEFAULT_GSAM_BETA};

/// Which classifier to train.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Logreg,
    Mlp {
        hidden: Vec<usize>,
        activation: Activation,
    },
}

/// Parameters of the rotated-domains generator plus the held-out domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub n_domains: usize,
    pub n_per_domain: usize,
    pub angle_step_degrees: f64,
    pub noise_std: f64,
    pub seed: u64,
    pub target_domain: usize,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            n_domains: 4,
            n_per_domain: 200,
            angle_step_degrees: 30.0,
            noise_std: 0.3,
            seed: 7,
            target_domain: 0,
        }
    }
}

fn default_beta() -> f64 {
    DEFAULT_GSAM_BETA
}

/// Rule plus every hyperparameter, flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    pub rule: Rule,
    #[serde(default = "OptimizerSpec::default_rho")]
    pub rho: f64,
    #[serde(default = "OptimizerSpec::default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub lr: f64,
    #[serde(default)]
    pub weight_decay: f64,
    #[serde(default = "OptimizerSpec::default_beta1")]
    pub adam_beta1: f64,
    #[serde(default = "OptimizerSpec::default_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "OptimizerSpec::default_eps")]
    pub adam_eps: f64,
}

impl OptimizerSpec {
    fn default_rho() -> f64 {
        HyperParams::default().rho
    }
    fn default_alpha() -> f64 {
        HyperParams::default().alpha
    }
    fn default_beta1() -> f64 {
        HyperParams::default().adam_beta1
    }
    fn default_beta2() -> f64 {
        HyperParams::default().adam_beta2
    }
    fn default_eps() -> f64 {
        HyperParams::default().adam_eps
    }

    pub fn new(rule: Rule, lr: f64) -> Self {
        let d = HyperParams::default();
        Self {
            rule,
            rho: d.rho,
            alpha: d.alpha,
            beta: d.beta,
            lr,
            weight_decay: d.weight_decay,
            adam_beta1: d.adam_beta1,
            adam_beta2: d.adam_beta2,
            adam_eps: d.adam_eps,
        }
    }

    pub fn hyper_params(&self) -> HyperParams {
        HyperParams {
            rho: self.rho,
            alpha: self.alpha,
            beta: self.beta,
            lr: self.lr,
            weight_decay: self.weight_decay,
            adam_beta1: self.adam_beta1,
            adam_beta2: self.adam_beta2,
            adam_eps: self.adam_eps,
        }
    }
}

fn default_batch_per_domain() -> usize {
    32
}

fn default_probe_rho() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSpec {
    /// Total iterations `T`.
    pub iterations: usize,
    pub eval_every: usize,
    #[serde(default = "default_batch_per_domain")]
    pub batch_per_domain: usize,
    /// Drives the in-domain split, initialization and batch sampling.
    pub seed: u64,
    /// Radius of the surrogate gap reported for the selected checkpoint.
    #[serde(default = "default_probe_rho")]
    pub probe_rho: f64,
}

/// Everything needed to reproduce one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub objective: ObjectiveSpec,
    pub dataset: DatasetSpec,
    pub optimizer: OptimizerSpec,
    pub training: TrainingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.training;
        if t.iterations == 0 {
            return Err(Error::Config("training.iterations must be >= 1".into()));
        }
        if t.eval_every == 0 {
            return Err(Error::Config("training.eval_every must be >= 1".into()));
        }
        if t.batch_per_domain == 0 {
            return Err(Error::Config(
                "training.batch_per_domain must be >= 1".into(),
            ));
        }
        if !(t.probe_rho.is_finite() && t.probe_rho >= 0.0) {
            return Err(Error::Config("training.probe_rho must be >= 0".into()));
        }
        self.optimizer.hyper_params().validate()?;
        let d = &self.dataset;
        if d.n_domains < 2 {
            return Err(Error::Config("dataset.n_domains must be >= 2".into()));
        }
        if d.target_domain >= d.n_domains {
            return Err(Error::Config(format!(
                "dataset.target_domain {} out of range for {} domains",
                d.target_domain, d.n_domains
            )));
        }
        if let ObjectiveSpec::Mlp { hidden, .. } = &self.objective {
            if hidden.contains(&0) {
                return Err(Error::Config("objective.hidden sizes must be >= 1".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "objective": {"kind": "mlp", "hidden": [4], "activation": "tanh"},
        "dataset": {"n_domains": 4, "n_per_domain": 200, "angle_step_degrees": 30,
                    "noise_std": 0.3, "seed": 7, "target_domain": 3},
        "optimizer": {"rule": "sagm", "lr": 0.01, "alpha": 0.0005},
        "training": {"iterations": 100, "eval_every": 10, "seed": 1}
    }"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = RunConfig::from_json(EXAMPLE).unwrap();
        assert_eq!(cfg.optimizer.rule, Rule::Sagm);
        assert_eq!(cfg.optimizer.rho, 0.05);
        assert_eq!(cfg.optimizer.beta, DEFAULT_GSAM_BETA);
        assert_eq!(cfg.training.batch_per_domain, 32);
        let back = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&back).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let typo = EXAMPLE.replace("\"alpha\"", "\"alpah\"");
        assert!(matches!(RunConfig::from_json(&typo), Err(Error::Config(_))));
        let top = EXAMPLE.replacen('{', "{\"extra\": 1,", 1);
        assert!(RunConfig::from_json(&top).is_err());
        let obj = EXAMPLE.replace(
            "\"activation\": \"tanh\"",
            "\"activation\": \"tanh\", \"depth\": 2",
        );
        assert!(RunConfig::from_json(&obj).is_err());
    }

    #[test]
    fn zero_iterations_rejected() {
        let bad = EXAMPLE.replace("\"iterations\": 100", "\"iterations\": 0");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn bad_rule_and_target_rejected() {
        assert!(RunConfig::from_json(&EXAMPLE.replace("sagm", "lookahead")).is_err());
        assert!(RunConfig::from_json(
            &EXAMPLE.replace("\"target_domain\": 3", "\"target_domain\": 4")
        )
        .is_err());
    }
}
