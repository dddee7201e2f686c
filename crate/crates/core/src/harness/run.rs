use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::model::Model;
use crate::data::{
    balanced_minibatch, in_domain_split, leave_one_out_split, make_rotated_domains, rng_from_seed,
    MultiDomainDataset,
};
use crate::error::{Error, Result};
use crate::objective::{Batch, Classifier, Objective};
use crate::optim::{adam_step, rule_gradient, surrogate_gap, OptimizerState, StepReport};
use crate::param::ParamVector;

/// The model and every data split a run touches, rebuilt from its config.
#[derive(Debug, Clone)]
pub struct ExperimentData {
    pub model: Model,
    /// Training portion of each source domain, used for batch sampling.
    pub sources: MultiDomainDataset,
    pub train: Batch,
    pub val: Batch,
    pub test: Batch,
    /// The held-out domain, never seen during training or selection.
    pub target: Batch,
}

/// Generates the data, holds out the target domain, splits the sources and
/// builds the model. Deterministic in the config.
pub fn prepare(cfg: &RunConfig) -> Result<ExperimentData> {
    cfg.validate()?;
    let d = &cfg.dataset;
    let ds = make_rotated_domains(
        d.n_domains,
        d.n_per_domain,
        d.angle_step_degrees,
        d.noise_std,
        d.seed,
    )?;
    let (sources, target) = leave_one_out_split(&ds, d.target_domain)?;
    let split = in_domain_split(&sources, cfg.training.seed)?;
    let model = Model::build(
        &cfg.objective,
        ds.n_features(),
        ds.n_classes(),
        cfg.training.seed,
    )?;
    Ok(ExperimentData {
        model,
        train: split.train.pooled(),
        val: split.val.pooled(),
        test: split.test.pooled(),
        target: target.examples().clone(),
        sources: split.train,
    })
}

/// Metrics at one evaluation point, with step diagnostics averaged over the
/// iterations since the previous one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub iteration: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
    pub target_accuracy: f64,
    pub mean_loss: f64,
    pub mean_gap: f64,
    pub mean_grad_norm: f64,
    pub mean_perturbed_grad_norm: f64,
    pub mean_cos_alignment: f64,
    pub mean_effective_radius: f64,
}

/// Metrics of the checkpoint chosen by in-domain validation accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    pub chosen_iteration: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
    pub target_accuracy: f64,
    pub probe_rho: f64,
    /// `h` at `probe_rho` over the pooled training split.
    pub surrogate_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: RunConfig,
    pub history: Vec<EvalRecord>,
    pub metrics: FinalMetrics,
    pub chosen_params: ParamVector,
    pub final_params: ParamVector,
    /// Not part of the reproducible outcome.
    pub wall_clock_seconds: f64,
}

impl RunResult {
    /// True when everything except wall-clock time matches.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        self.config == other.config
            && self.history == other.history
            && self.metrics == other.metrics
            && self.chosen_params == other.chosen_params
            && self.final_params == other.final_params
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

#[derive(Default)]
struct Accumulator {
    n: usize,
    loss: f64,
    gap: f64,
    grad_norm: f64,
    perturbed_grad_norm: f64,
    cos: f64,
    radius: f64,
}

impl Accumulator {
    fn push(&mut self, r: &StepReport) {
        self.n += 1;
        self.loss += r.loss;
        self.gap += r.gap;
        self.grad_norm += r.grad_norm;
        self.perturbed_grad_norm += r.perturbed_grad_norm;
        self.cos += r.cos_alignment;
        self.radius += r.effective_radius;
    }

    fn mean(v: f64, n: usize) -> f64 {
        v / n as f64
    }
}

fn diverged(iteration: usize) -> impl Fn(Error) -> Error {
    move |e| {
        if e.is_divergence() {
            Error::Diverged { iteration }
        } else {
            e
        }
    }
}

/// Trains one model with the configured rule and Adam, evaluating every
/// `eval_every` iterations and at the last one. The returned metrics belong
/// to the checkpoint with the best validation accuracy (earliest on ties).
pub fn run_experiment(cfg: &RunConfig) -> Result<RunResult> {
    let start = Instant::now();
    let data = prepare(cfg)?;
    let model = &data.model;
    let hp = cfg.optimizer.hyper_params();
    let rule = cfg.optimizer.rule;
    let t_max = cfg.training.iterations;

    let mut rng = rng_from_seed(cfg.training.seed);
    // separate stream from the split shuffle, which uses the same seed
    rng.set_stream(1);

    let mut params = model.initial_params();
    let mut state = OptimizerState::new(params.dim());
    let mut acc = Accumulator::default();
    let mut history = Vec::new();
    let mut best: Option<(f64, usize, ParamVector)> = None;

    for t in 1..=t_max {
        let batch = balanced_minibatch(&data.sources, cfg.training.batch_per_domain, &mut rng)?;
        let (g, report) = rule_gradient(rule, model, &params, &batch, &hp).map_err(diverged(t))?;
        if !(report.loss.is_finite() && report.perturbed_loss.is_finite()) {
            return Err(Error::Diverged { iteration: t });
        }
        let (next, next_state) = adam_step(&state, &params, &g, &hp).map_err(diverged(t))?;
        params = next;
        state = next_state;
        acc.push(&report);

        if t % cfg.training.eval_every == 0 || t == t_max {
            let train_loss = model.loss(&params, &data.train).map_err(diverged(t))?;
            if !train_loss.is_finite() {
                return Err(Error::Diverged { iteration: t });
            }
            let val_accuracy = model.accuracy(&params, &data.val)?;
            let n = acc.n;
            history.push(EvalRecord {
                iteration: t,
                train_loss,
                val_accuracy,
                target_accuracy: model.accuracy(&params, &data.target)?,
                mean_loss: Accumulator::mean(acc.loss, n),
                mean_gap: Accumulator::mean(acc.gap, n),
                mean_grad_norm: Accumulator::mean(acc.grad_norm, n),
                mean_perturbed_grad_norm: Accumulator::mean(acc.perturbed_grad_norm, n),
                mean_cos_alignment: Accumulator::mean(acc.cos, n),
                mean_effective_radius: Accumulator::mean(acc.radius, n),
            });
            acc = Accumulator::default();
            if best.as_ref().is_none_or(|(v, _, _)| val_accuracy > *v) {
                best = Some((val_accuracy, t, params.clone()));
            }
        }
    }

    let (val_accuracy, chosen_iteration, chosen) = best.expect("at least one evaluation");
    let probe_rho = cfg.training.probe_rho;
    let metrics = FinalMetrics {
        chosen_iteration,
        train_loss: model.loss(&chosen, &data.train)?,
        val_accuracy,
        test_accuracy: model.accuracy(&chosen, &data.test)?,
        target_accuracy: model.accuracy(&chosen, &data.target)?,
        probe_rho,
        surrogate_gap: surrogate_gap(model, &chosen, &data.train, probe_rho)?,
    };
    Ok(RunResult {
        config: cfg.clone(),
        history,
        metrics,
        chosen_params: chosen,
        final_params: params,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}
