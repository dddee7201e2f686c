//! Experiment orchestration: configured training runs, sweeps,
//! leave-one-domain-out evaluation, sharpness-curve export and the two-well
//! landscape demonstration.

mod config;
mod curves;
mod landscape;
mod loo;
mod model;
mod report;
mod run;
mod stats;
mod sweep;

pub use config::{DatasetSpec, ObjectiveSpec, OptimizerSpec, RunConfig, TrainingSpec};
pub use curves::{export_sharpness_curves, write_curves_csv, CurveRow, CURVES_CSV_HEADER};
pub use landscape::{
    landscape_demo, BasinFractions, LandscapeConfig, LandscapeReport, MinimumReport,
};
pub use loo::{run_leave_one_out, LooOutcome, LooRun, TargetRow, DEFAULT_TRIALS};
pub use model::Model;
pub use report::{summarize_dir, RunSummary};
pub use run::{prepare, run_experiment, EvalRecord, ExperimentData, FinalMetrics, RunResult};
pub use stats::{aggregate_trials, model_selection};
pub use sweep::{
    hyperparameter_sweep, Override, SweepGrid, SweepOutcome, SweepRow, SweepSpec, SweepTable,
};
