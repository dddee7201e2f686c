//! `sagm`: train, sweep and evaluate sharpness-aware rules on synthetic
//! multi-domain data.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sagm_core::harness::{
    export_sharpness_curves, hyperparameter_sweep, landscape_demo, model_selection, prepare,
    run_experiment, run_leave_one_out, summarize_dir, write_curves_csv, LandscapeConfig, RunConfig,
    RunResult, RunSummary, SweepSpec, DEFAULT_TRIALS,
};
use sagm_core::sharpness::{gap_profile, PowerIteration};
use sagm_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "sagm",
    version,
    about = "Sharpness-aware gradient matching experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Split {
    Train,
    Val,
    Test,
    Target,
}

#[derive(Subcommand)]
enum Command {
    /// Run one training configuration and write its result JSON.
    Train {
        config: PathBuf,
        /// Overrides the config's `output` path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every grid point of a sweep file and print the results table.
    Sweep {
        spec: PathBuf,
        /// Directory for `sweep.csv` and one JSON file per successful run.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Hold out each domain in turn over several seeds.
    Loo {
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print the gap profile of a trained run's selected checkpoint.
    Sharpness {
        run: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.02, 0.05, 0.1])]
        radii: Vec<f64>,
        #[arg(long, value_enum, default_value = "target")]
        split: Split,
    },
    /// Compare where ERM, SAM and SAGM settle on a two-well landscape.
    Landscape {
        #[arg(long)]
        rho: Option<f64>,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Summarize every run JSON file in a directory.
    Report {
        dir: PathBuf,
        /// Also write sharpness curves for the runs to this CSV file.
        #[arg(long)]
        curves: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.02, 0.05, 0.1])]
        radii: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_divergence() { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    let stdout = io::stdout();
    match command {
        Command::Train { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let result = run_experiment(&cfg)?;
            if let Some(path) = out.or_else(|| cfg.output.clone()) {
                result.write_json(&path)?;
            } else {
                serde_json::to_writer_pretty(stdout.lock(), &result)?;
                println!();
            }
            let m = &result.metrics;
            eprintln!(
                "{}: chosen iteration {}, val {:.4}, target {:.4}, h {:.3e} ({:.2} s)",
                cfg.optimizer.rule,
                m.chosen_iteration,
                m.val_accuracy,
                m.target_accuracy,
                m.surrogate_gap,
                result.wall_clock_seconds
            );
        }
        Command::Sweep { spec, out_dir } => {
            let spec = SweepSpec::from_json(&std::fs::read_to_string(&spec)?)?;
            let outcome = hyperparameter_sweep(&spec.base, &spec.grid.expand())?;
            match &out_dir {
                Some(dir) => {
                    outcome.write_runs(dir)?;
                    outcome
                        .table
                        .write_csv(File::create(dir.join("sweep.csv"))?)?;
                }
                None => outcome.table.write_csv(stdout.lock())?,
            }
            match model_selection(&outcome.table) {
                Ok(id) => eprintln!("selected config {id}"),
                Err(e) => eprintln!("{e}"),
            }
        }
        Command::Loo {
            config,
            trials,
            out_dir,
        } => {
            let cfg = RunConfig::load(&config)?;
            let outcome = run_leave_one_out(&cfg, trials)?;
            match &out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    for r in &outcome.results {
                        let name = format!(
                            "target{}_seed{}.json",
                            r.config.dataset.target_domain, r.config.training.seed
                        );
                        r.write_json(&dir.join(name))?;
                    }
                    outcome.write_csv(File::create(dir.join("loo.csv"))?)?;
                }
                None => outcome.write_csv(stdout.lock())?,
            }
        }
        Command::Sharpness { run, radii, split } => {
            let result = RunResult::load(&run)?;
            let data = prepare(&result.config)?;
            let batch = match split {
                Split::Train => &data.train,
                Split::Val => &data.val,
                Split::Test => &data.test,
                Split::Target => &data.target,
            };
            let profile = gap_profile(
                &data.model,
                &result.chosen_params,
                batch,
                &radii,
                &PowerIteration::default(),
            )?;
            profile.write_csv(stdout.lock())?;
            if !profile.lambda_converged {
                eprintln!(
                    "warning: power iteration did not converge; lambda_max is the last estimate"
                );
            }
            if profile.degenerate_gradient {
                eprintln!("warning: gradient is numerically zero; gaps are reported as 0");
            }
        }
        Command::Landscape { rho, json } => {
            let mut cfg = LandscapeConfig::default();
            if let Some(rho) = rho {
                cfg.rho = rho;
            }
            let report = landscape_demo(&cfg)?;
            let mut out = stdout.lock();
            if json {
                serde_json::to_writer_pretty(&mut out, &report)?;
                writeln!(out)?;
            } else {
                write!(out, "{report}")?;
            }
        }
        Command::Report { dir, curves, radii } => {
            let (rows, results) = summarize_dir(&dir)?;
            if rows.is_empty() {
                return Err(Error::Config(format!("no run files in {}", dir.display())));
            }
            RunSummary::write_csv(&rows, stdout.lock())?;
            if let Some(path) = curves {
                write_curves(&path, &results, &radii)?;
            }
        }
    }
    Ok(())
}

fn write_curves(path: &Path, results: &[RunResult], radii: &[f64]) -> Result<()> {
    let rows = export_sharpness_curves(results, radii)?;
    write_curves_csv(&rows, File::create(path)?)
}
