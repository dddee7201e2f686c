use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::run::{run_experiment, RunResult};
use super::stats::aggregate_trials;
use crate::error::{Error, Result};
use crate::optim::Rule;

/// Trials per target domain unless the caller asks otherwise.
pub const DEFAULT_TRIALS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooRun {
    pub target_domain: usize,
    pub seed: u64,
    pub val_accuracy: f64,
    pub target_accuracy: f64,
    pub surrogate_gap: f64,
}

/// Target accuracy over trials for one held-out domain. `std_error` is
/// absent when there is a single trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRow {
    pub target_domain: usize,
    pub mean_accuracy: f64,
    pub std_error: Option<f64>,
    pub n_trials: usize,
}

#[derive(Debug, Clone)]
pub struct LooOutcome {
    pub rule: Rule,
    pub runs: Vec<LooRun>,
    pub per_target: Vec<TargetRow>,
    /// Mean over trials of the target-averaged accuracy.
    pub overall_mean: f64,
    pub overall_std_error: Option<f64>,
    pub results: Vec<RunResult>,
}

fn summarize(values: &[f64]) -> Result<(f64, Option<f64>)> {
    if values.len() == 1 {
        return Ok((values[0], None));
    }
    let (m, se) = aggregate_trials(values)?;
    Ok((m, Some(se)))
}

impl LooOutcome {
    /// Rows `rule,target,mean_accuracy,std_error,n_trials`, one per target
    /// domain followed by `overall`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["rule", "target", "mean_accuracy", "std_error", "n_trials"])?;
        let fmt_se = |se: Option<f64>| se.map(|v| format!("{v:.16e}")).unwrap_or_default();
        for row in &self.per_target {
            w.write_record([
                self.rule.name().to_string(),
                row.target_domain.to_string(),
                format!("{:.16e}", row.mean_accuracy),
                fmt_se(row.std_error),
                row.n_trials.to_string(),
            ])?;
        }
        let n = self.per_target.first().map_or(0, |r| r.n_trials);
        w.write_record([
            self.rule.name().to_string(),
            "overall".into(),
            format!("{:.16e}", self.overall_mean),
            fmt_se(self.overall_std_error),
            n.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    }
}

/// Holds out every domain in turn for `trials` seeds (`seed`, `seed + 1`,
/// ...) of the base config and reports target accuracy per held-out domain
/// and overall. Runs execute in parallel; any failing run is an error.
pub fn run_leave_one_out(base: &RunConfig, trials: usize) -> Result<LooOutcome> {
    if trials == 0 {
        return Err(Error::invalid("leave-one-out needs at least one trial"));
    }
    base.validate()?;
    let n_domains = base.dataset.n_domains;
    let jobs: Vec<RunConfig> = (0..n_domains)
        .flat_map(|target| {
            (0..trials as u64).map(move |k| {
                let mut cfg = base.clone();
                cfg.dataset.target_domain = target;
                cfg.training.seed = base.training.seed.wrapping_add(k);
                cfg.output = None;
                cfg
            })
        })
        .collect();
    let results: Vec<RunResult> = jobs.par_iter().map(run_experiment).collect::<Result<_>>()?;

    let runs: Vec<LooRun> = results
        .iter()
        .map(|r| LooRun {
            target_domain: r.config.dataset.target_domain,
            seed: r.config.training.seed,
            val_accuracy: r.metrics.val_accuracy,
            target_accuracy: r.metrics.target_accuracy,
            surrogate_gap: r.metrics.surrogate_gap,
        })
        .collect();

    let mut per_target = Vec::with_capacity(n_domains);
    for target in 0..n_domains {
        let accs: Vec<f64> = runs[target * trials..(target + 1) * trials]
            .iter()
            .map(|r| r.target_accuracy)
            .collect();
        let (mean_accuracy, std_error) = summarize(&accs)?;
        per_target.push(TargetRow {
            target_domain: target,
            mean_accuracy,
            std_error,
            n_trials: trials,
        });
    }

    let per_trial: Vec<f64> = (0..trials)
        .map(|k| {
            (0..n_domains)
                .map(|t| runs[t * trials + k].target_accuracy)
                .sum::<f64>()
                / n_domains as f64
        })
        .collect();
    let (overall_mean, overall_std_error) = summarize(&per_trial)?;

    Ok(LooOutcome {
        rule: base.optimizer.rule,
        runs,
        per_target,
        overall_mean,
        overall_std_error,
        results,
    })
}
