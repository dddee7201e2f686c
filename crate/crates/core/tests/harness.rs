use sagm_core::harness::{
    aggregate_trials, export_sharpness_curves, hyperparameter_sweep, landscape_demo,
    model_selection, run_experiment, run_leave_one_out, summarize_dir, write_curves_csv,
    LandscapeConfig, Override, RunConfig, RunResult, SweepGrid, SweepSpec, CURVES_CSV_HEADER,
};
use sagm_core::{Error, Rule};

fn small_config(rule: &str) -> RunConfig {
    RunConfig::from_json(&format!(
        r#"{{
            "objective": {{"kind": "mlp", "hidden": [4], "activation": "tanh"}},
            "dataset": {{"n_domains": 3, "n_per_domain": 60, "angle_step_degrees": 30,
                         "noise_std": 0.3, "seed": 2, "target_domain": 2}},
            "optimizer": {{"rule": "{rule}", "lr": 0.02}},
            "training": {{"iterations": 60, "eval_every": 20, "batch_per_domain": 8, "seed": 4}}
        }}"#
    ))
    .unwrap()
}

#[test]
fn runs_are_deterministic() {
    let cfg = small_config("sagm");
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert!(a.same_outcome(&b));
    let mut other = cfg.clone();
    other.training.seed = 5;
    assert!(!a.same_outcome(&run_experiment(&other).unwrap()));
}

#[test]
fn history_and_checkpoint_invariants() {
    for rule in Rule::ALL {
        let r = run_experiment(&small_config(rule.name())).unwrap();
        let iters: Vec<usize> = r.history.iter().map(|e| e.iteration).collect();
        assert_eq!(iters, vec![20, 40, 60]);
        let best = r
            .history
            .iter()
            .map(|e| e.val_accuracy)
            .fold(f64::MIN, f64::max);
        assert_eq!(r.metrics.val_accuracy, best);
        let first_best = r.history.iter().find(|e| e.val_accuracy == best).unwrap();
        assert_eq!(r.metrics.chosen_iteration, first_best.iteration);
    }
}

#[test]
fn uneven_eval_interval_still_evaluates_last_iteration() {
    let mut cfg = small_config("erm");
    cfg.training.iterations = 50;
    let r = run_experiment(&cfg).unwrap();
    let iters: Vec<usize> = r.history.iter().map(|e| e.iteration).collect();
    assert_eq!(iters, vec![20, 40, 50]);
}

#[test]
fn exploding_learning_rate_is_divergence() {
    let mut cfg = small_config("sam");
    cfg.optimizer.lr = 1e308;
    assert!(matches!(run_experiment(&cfg), Err(Error::Diverged { .. })));
}

#[test]
fn result_file_round_trips_with_config() {
    let r = run_experiment(&small_config("gsam")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/run.json");
    r.write_json(&path).unwrap();
    let back = RunResult::load(&path).unwrap();
    assert!(back.same_outcome(&r));
    let (rows, _) = summarize_dir(path.parent().unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].rule, Rule::Gsam);
}

#[test]
fn sweep_records_failures_and_selects_best() {
    let base = small_config("erm");
    let mut overrides = SweepGrid {
        rule: vec![Rule::Erm, Rule::Sagm],
        lr: vec![0.02, 0.005],
        ..Default::default()
    }
    .expand();
    overrides.push(Override {
        lr: Some(-1.0),
        ..Default::default()
    });
    let out = hyperparameter_sweep(&base, &overrides).unwrap();
    let rows = &out.table.rows;
    assert_eq!(rows.len(), 5);
    assert_eq!(
        rows.iter().map(|r| r.config_id).collect::<Vec<_>>(),
        vec![0, 1, 2, 3, 4]
    );
    assert!(rows[..4].iter().all(|r| r.succeeded()));
    assert_eq!(rows[4].status, "failed");
    assert!(out.results[4].is_none());

    let best = model_selection(&out.table).unwrap();
    let best_val = rows[best].val_accuracy.unwrap();
    assert!(rows
        .iter()
        .filter_map(|r| r.val_accuracy)
        .all(|v| v <= best_val));
    assert!(rows[..best]
        .iter()
        .all(|r| r.val_accuracy.is_none_or(|v| v < best_val)));

    let mut csv = Vec::new();
    out.table.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 6);
}

#[test]
fn model_selection_fails_when_everything_failed() {
    let base = small_config("erm");
    let bad = Override {
        rho: Some(-0.1),
        ..Default::default()
    };
    let out = hyperparameter_sweep(&base, &[bad.clone(), bad]).unwrap();
    assert!(model_selection(&out.table).is_err());
}

#[test]
fn sweep_spec_parses() {
    let text = format!(
        r#"{{"base": {}, "grid": {{"rule": ["sam", "sagm"], "alpha": [0.001, 0.0005]}}}}"#,
        serde_json::to_string(&small_config("erm")).unwrap()
    );
    let spec = SweepSpec::from_json(&text).unwrap();
    assert_eq!(spec.grid.expand().len(), 4);
    assert!(SweepSpec::from_json(&text.replace("\"alpha\"", "\"alfa\"")).is_err());
}

#[test]
fn leave_one_out_covers_every_target() {
    let cfg = small_config("erm");
    let out = run_leave_one_out(&cfg, 2).unwrap();
    assert_eq!(out.results.len(), 6);
    assert_eq!(out.per_target.len(), 3);
    let per_trial: Vec<f64> = (0..2)
        .map(|k| {
            (0..3)
                .map(|t| out.runs[t * 2 + k].target_accuracy)
                .sum::<f64>()
                / 3.0
        })
        .collect();
    let (mean, se) = aggregate_trials(&per_trial).unwrap();
    assert_eq!(out.overall_mean, mean);
    assert_eq!(out.overall_std_error, Some(se));

    let single = run_leave_one_out(&cfg, 1).unwrap();
    assert!(single.per_target.iter().all(|t| t.std_error.is_none()));
    let mut csv = Vec::new();
    single.write_csv(&mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().contains("erm,overall,"));
}

#[test]
fn curves_export_one_row_per_target_and_radius() {
    let r = run_experiment(&small_config("sam")).unwrap();
    let radii = [0.01, 0.02, 0.05, 0.1];
    let rows = export_sharpness_curves(&[r.clone(), r], &radii).unwrap();
    assert_eq!(rows.len(), radii.len());
    assert!(rows.windows(2).all(|w| w[0].gap <= w[1].gap));
    let mut out = Vec::new();
    write_curves_csv(&rows, &mut out).unwrap();
    assert!(String::from_utf8(out)
        .unwrap()
        .starts_with(CURVES_CSV_HEADER));
    assert!(export_sharpness_curves(&[], &radii).is_err());
}

#[test]
fn symmetric_wells_split_evenly() {
    let report = landscape_demo(&LandscapeConfig::symmetric()).unwrap();
    let (a, b) = (&report.minima[0], &report.minima[1]);
    assert!((a.gap - b.gap).abs() < 1e-10);
    for basin in &report.basins {
        assert!((basin.fractions[0] - 0.5).abs() <= 0.1, "{basin:?}");
    }
}

#[test]
fn zero_radius_has_no_gap() {
    let cfg = LandscapeConfig {
        rho: 0.0,
        n_inits: 4,
        iterations: 10,
        ..LandscapeConfig::default()
    };
    let report = landscape_demo(&cfg).unwrap();
    for m in &report.minima {
        assert_eq!(m.perturbed_loss, m.loss);
        assert_eq!(m.gap, 0.0);
    }
}

#[test]
fn default_landscape_orders_sharp_and_flat() {
    let report = landscape_demo(&LandscapeConfig::default()).unwrap();
    assert!(report.ordering_holds());
    let sharp = &report.minima[report.sharp];
    let flat = &report.minima[report.flat()];
    assert!(sharp.loss < flat.loss);
    assert!(sharp.curvature > flat.curvature);
}

#[test]
fn sagm_without_alpha_retraces_erm_sam() {
    let mut a = small_config("sagm");
    a.optimizer.alpha = 0.0;
    let mut b = a.clone();
    b.optimizer.rule = Rule::ErmSam;
    let (ra, rb) = (run_experiment(&a).unwrap(), run_experiment(&b).unwrap());
    assert_eq!(ra.final_params, rb.final_params);
    assert_eq!(ra.history, rb.history);
}

#[test]
fn singleton_sweep_matches_a_plain_run() {
    let base = small_config("sam");
    let out = hyperparameter_sweep(&base, &SweepGrid::default().expand()).unwrap();
    let direct = run_experiment(&base).unwrap();
    assert!(out.results[0].as_ref().unwrap().same_outcome(&direct));
    assert_eq!(
        out.table.rows[0].val_accuracy,
        Some(direct.metrics.val_accuracy)
    );
}

#[test]
fn alpha_grid_gives_one_row_per_value() {
    let grid = SweepGrid {
        alpha: vec![0.001, 0.0005],
        ..Default::default()
    };
    let out = hyperparameter_sweep(&small_config("sagm"), &grid.expand()).unwrap();
    let alphas: Vec<f64> = out.table.rows.iter().map(|r| r.alpha).collect();
    assert_eq!(alphas, vec![0.001, 0.0005]);
}

#[test]
fn no_shift_target_tracks_validation() {
    for seed in 0..3 {
        let mut cfg = RunConfig::from_json(
            r#"{
                "objective": {"kind": "logreg"},
                "dataset": {"n_domains": 4, "n_per_domain": 200, "angle_step_degrees": 0,
                            "noise_std": 0.3, "seed": 7, "target_domain": 3},
                "optimizer": {"rule": "erm", "lr": 0.01},
                "training": {"iterations": 2000, "eval_every": 100, "seed": 0}
            }"#,
        )
        .unwrap();
        cfg.training.seed = seed;
        let m = run_experiment(&cfg).unwrap().metrics;
        assert!((m.target_accuracy - m.val_accuracy).abs() <= 0.03, "{m:?}");
    }
}

#[test]
fn curve_rows_count_rules_targets_radii() {
    let mut results = Vec::new();
    for rule in ["sam", "gsam", "sagm"] {
        let mut cfg = small_config(rule);
        cfg.dataset.n_domains = 4;
        cfg.training.iterations = 10;
        cfg.training.eval_every = 10;
        for t in 0..4 {
            cfg.dataset.target_domain = t;
            results.push(run_experiment(&cfg).unwrap());
        }
    }
    let radii = [0.01, 0.02, 0.05, 0.1, 0.2];
    let rows = export_sharpness_curves(&results, &radii).unwrap();
    assert_eq!(rows.len(), 60);

    // pass-through of the profile computation
    let r = &results[5];
    let data = sagm_core::harness::prepare(&r.config).unwrap();
    let profile = sagm_core::sharpness::gap_profile(
        &data.model,
        &r.chosen_params,
        &data.target,
        &radii,
        &sagm_core::sharpness::PowerIteration::default(),
    )
    .unwrap();
    let exported: Vec<f64> = rows[5 * radii.len()..6 * radii.len()]
        .iter()
        .map(|c| c.gap)
        .collect();
    assert_eq!(exported, profile.gaps);
}

#[test]
fn per_target_means_average_their_seeds() {
    let out = run_leave_one_out(&small_config("sagm"), 3).unwrap();
    for row in &out.per_target {
        let accs: Vec<f64> = out
            .runs
            .iter()
            .filter(|r| r.target_domain == row.target_domain)
            .map(|r| r.target_accuracy)
            .collect();
        assert_eq!(accs.len(), 3);
        assert!((row.mean_accuracy - accs.iter().sum::<f64>() / 3.0).abs() < 1e-15);
    }
}
