use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::run::{run_experiment, RunResult};
use crate::error::{Error, Result};
use crate::optim::Rule;

/// Fields of a [`RunConfig`] a sweep may vary. `None` keeps the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Override {
    pub rule: Option<Rule>,
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub lr: Option<f64>,
    pub weight_decay: Option<f64>,
    pub seed: Option<u64>,
    pub target_domain: Option<usize>,
}

impl Override {
    pub fn apply(&self, base: &RunConfig) -> RunConfig {
        let mut cfg = base.clone();
        let o = &mut cfg.optimizer;
        if let Some(v) = self.rule {
            o.rule = v;
        }
        if let Some(v) = self.rho {
            o.rho = v;
        }
        if let Some(v) = self.alpha {
            o.alpha = v;
        }
        if let Some(v) = self.beta {
            o.beta = v;
        }
        if let Some(v) = self.lr {
            o.lr = v;
        }
        if let Some(v) = self.weight_decay {
            o.weight_decay = v;
        }
        if let Some(v) = self.seed {
            cfg.training.seed = v;
        }
        if let Some(v) = self.target_domain {
            cfg.dataset.target_domain = v;
        }
        cfg.output = None;
        cfg
    }
}

/// Axes of a cartesian grid. An empty axis keeps the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub rule: Vec<Rule>,
    pub rho: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub lr: Vec<f64>,
    pub weight_decay: Vec<f64>,
    pub seed: Vec<u64>,
    pub target_domain: Vec<usize>,
}

fn axis<T: Copy>(values: &[T]) -> Vec<Option<T>> {
    if values.is_empty() {
        vec![None]
    } else {
        values.iter().copied().map(Some).collect()
    }
}

impl SweepGrid {
    /// Cartesian product in field order; the last axis varies fastest.
    pub fn expand(&self) -> Vec<Override> {
        let mut out = vec![Override::default()];
        macro_rules! cross {
            ($field:ident) => {
                out = out
                    .into_iter()
                    .flat_map(|o| {
                        axis(&self.$field).into_iter().map(move |v| Override {
                            $field: v,
                            ..o.clone()
                        })
                    })
                    .collect();
            };
        }
        cross!(rule);
        cross!(rho);
        cross!(alpha);
        cross!(beta);
        cross!(lr);
        cross!(weight_decay);
        cross!(seed);
        cross!(target_domain);
        out
    }
}

/// A sweep file: a base configuration and the grid to apply to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: RunConfig,
    #[serde(default)]
    pub grid: SweepGrid,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.base.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub config_id: usize,
    pub rule: Rule,
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lr: f64,
    pub weight_decay: f64,
    pub seed: u64,
    pub target_domain: usize,
    pub status: String,
    pub val_accuracy: Option<f64>,
    pub target_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub surrogate_gap: Option<f64>,
    pub chosen_iteration: Option<usize>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub table: SweepTable,
    /// Full results in row order; `None` where the run failed.
    pub results: Vec<Option<RunResult>>,
}

impl SweepOutcome {
    /// Writes `run_<id>.json` for every successful run.
    pub fn write_runs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (id, r) in self.results.iter().enumerate() {
            if let Some(r) = r {
                r.write_json(&dir.join(format!("run_{id:04}.json")))?;
            }
        }
        Ok(())
    }
}

/// Runs every override of `base` in parallel. A failing configuration
/// becomes a row with `status = "failed"` and never aborts the sweep; row
/// order matches `overrides`.
pub fn hyperparameter_sweep(base: &RunConfig, overrides: &[Override]) -> Result<SweepOutcome> {
    if overrides.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    let outcomes: Vec<(SweepRow, Option<RunResult>)> = overrides
        .par_iter()
        .enumerate()
        .map(|(id, o)| {
            let cfg = o.apply(base);
            let run = run_experiment(&cfg);
            let opt = &cfg.optimizer;
            let mut row = SweepRow {
                config_id: id,
                rule: opt.rule,
                rho: opt.rho,
                alpha: opt.alpha,
                beta: opt.beta,
                lr: opt.lr,
                weight_decay: opt.weight_decay,
                seed: cfg.training.seed,
                target_domain: cfg.dataset.target_domain,
                status: "ok".into(),
                val_accuracy: None,
                target_accuracy: None,
                test_accuracy: None,
                surrogate_gap: None,
                chosen_iteration: None,
                error: None,
            };
            match run {
                Ok(r) => {
                    let m = &r.metrics;
                    row.val_accuracy = Some(m.val_accuracy);
                    row.target_accuracy = Some(m.target_accuracy);
                    row.test_accuracy = Some(m.test_accuracy);
                    row.surrogate_gap = Some(m.surrogate_gap);
                    row.chosen_iteration = Some(m.chosen_iteration);
                    (row, Some(r))
                }
                Err(e) => {
                    row.status = "failed".into();
                    row.error = Some(e.to_string());
                    (row, None)
                }
            }
        })
        .collect();
    let (rows, results) = outcomes.into_iter().unzip();
    Ok(SweepOutcome {
        table: SweepTable { rows },
        results,
    })
}
