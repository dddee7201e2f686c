use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::RunResult;
use crate::error::Result;
use crate::optim::Rule;

/// One row per run file found by [`summarize_dir`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub file: String,
    pub rule: Rule,
    pub target_domain: usize,
    pub seed: u64,
    pub chosen_iteration: usize,
    pub val_accuracy: f64,
    pub target_accuracy: f64,
    pub surrogate_gap: f64,
}

impl RunSummary {
    pub fn write_csv<W: Write>(rows: &[RunSummary], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Loads every `*.json` run result in `dir` (sorted by file name). Files
/// that are not run results are skipped.
pub fn summarize_dir(dir: &Path) -> Result<(Vec<RunSummary>, Vec<RunResult>)> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for path in paths {
        let Ok(r) = RunResult::load(&path) else {
            continue;
        };
        rows.push(RunSummary {
            file: path
                .file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned(),
            rule: r.config.optimizer.rule,
            target_domain: r.config.dataset.target_domain,
            seed: r.config.training.seed,
            chosen_iteration: r.metrics.chosen_iteration,
            val_accuracy: r.metrics.val_accuracy,
            target_accuracy: r.metrics.target_accuracy,
            surrogate_gap: r.metrics.surrogate_gap,
        });
        results.push(r);
    }
    Ok((rows, results))
}
