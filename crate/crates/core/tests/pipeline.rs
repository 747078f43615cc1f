use std::path::PathBuf;

use imusic::harness::{output, presets, RunConfig, SignalDim};
use imusic::prelude::*;
use proptest::prelude::*;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("imusic-pipeline-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn six_sources_at_20db_within_one_degree() {
    let sc = presets::six_source_scenario(20.0).unwrap();
    let opts = TrialOptions::default();
    for seed in 0..10 {
        let est = run_trial(&sc, 2000, seed, &opts).unwrap();
        for e in match_estimates(&sc.sorted_angles(), &est).unwrap() {
            assert!(e.abs() <= 1.0, "seed {seed}: error {e}");
        }
    }
}

#[test]
fn population_noncircular_is_exact_for_both_estimators() {
    let geom = nested_array(3, 3).unwrap();
    let sources = vec![
        SourceSpec::bpsk(-61.3, 1.0, 0.2),
        SourceSpec::pam(-7.5, 0.7, 2.9, 8),
        SourceSpec::bpsk(12.0, 2.0, 1.4),
        SourceSpec::bpsk(48.8, 1.0, 0.0),
    ];
    let sc = Scenario::new(geom, sources, 0.0).unwrap();
    for estimator in [Estimator::Imusic, Estimator::UlBaseline] {
        let opts = TrialOptions { population: true, estimator, ..TrialOptions::default() };
        assert_eq!(run_trial(&sc, 1, 0, &opts).unwrap(), sc.sorted_angles());
    }
}

#[test]
fn config_file_drives_a_run_and_writes_outputs() {
    let dir = scratch("cfg");
    let cfg_path = dir.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "# three sources\npositions = 1,2,3,4,8,12\nsnr_db = 15\nsnapshots = 400\nseed = 11\ngrid_step = 0.2\n\
         source.1.theta = -30\nsource.2.theta = 0\nsource.2.kind = pam\nsource.3.theta = 30\nsource.3.kind = circular\n\
         sweep.values = 0,10\ntrials = 3\n",
    )
    .unwrap();
    let cfg = RunConfig::from_file(&cfg_path).unwrap();
    let sc = cfg.scenario().unwrap();
    assert_eq!(sc.sorted_angles(), vec![-30.0, 0.0, 30.0]);

    let opts = cfg.trial_options().unwrap();
    let est = run_trial(&sc, cfg.snapshots, cfg.seed, &opts).unwrap();
    assert_eq!(est.len(), 3);

    let ru = imusic::harness::extended_from_scenario(&sc, cfg.snapshots, cfg.seed, false).unwrap();
    let spec = imusic::harness::spectrum_from_extended(&ru, 3, &opts.grid, opts.estimator).unwrap();
    let csv = dir.join("spectrum.csv");
    let gp = output::write_spectrum(&csv, &spec, &sc.sorted_angles()).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), spec.len() + 1);
    assert!(std::fs::read_to_string(gp).unwrap().contains("'spectrum.csv'"));

    let report = rmse_sweep(&cfg.sweep_config().unwrap()).unwrap();
    let csv = dir.join("rmse.csv");
    output::write_sweep(&csv, &report).unwrap();
    let rows: Vec<String> = std::fs::read_to_string(&csv).unwrap().lines().map(String::from).collect();
    assert_eq!(rows[0], output::SWEEP_HEADER);
    assert_eq!(rows.len(), 3);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn snapshot_sweep_counts_failures() {
    let cfg = SweepConfig {
        values: vec![50.0, 400.0],
        trials: 5,
        grid_step: 0.5,
        ..presets::snapshot_sweep()
    };
    let report = rmse_sweep(&cfg).unwrap();
    for p in &report.points {
        assert_eq!(p.trials, 5);
        assert!(p.failures <= p.trials);
        assert!(p.rmse_deg.is_nan() || p.rmse_deg >= 0.0);
    }
}

fn mixture(ticks: &[i64], circular: usize) -> Vec<SourceSpec> {
    ticks
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let theta = t as f64 / 10.0;
            if i < circular {
                SourceSpec::circular(theta, 1.0)
            } else {
                SourceSpec::bpsk(theta, 1.0, 0.4 * i as f64)
            }
        })
        .collect()
}

fn spaced_ticks(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-65i64..=65, n).prop_map(|s| s.into_iter().map(|t| t * 10).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // K_c must stay below the 4-row bottom block
    #[test]
    fn rank_dimension_recovers_noiseless_mixtures(
        (ticks, circular) in (2usize..=8).prop_flat_map(|k| (spaced_ticks(k), 0..=(14 - k).min(k).min(3)))
    ) {
        prop_assume!(ticks.windows(2).all(|w| w[1] - w[0] >= 40));
        let sources = imusic::harness::config::canonical_order(mixture(&ticks, circular));
        let sc = Scenario::new(nested_array(3, 3).unwrap(), sources, 0.0).unwrap();
        let opts = TrialOptions { population: true, signal_dim: SignalDim::Rank, ..TrialOptions::default() };
        prop_assert_eq!(run_trial(&sc, 1, 0, &opts).unwrap(), sc.sorted_angles());
    }

    #[test]
    fn matching_ignores_input_order(
        pairs in prop::collection::vec((-80.0f64..80.0, -1.0f64..1.0), 1..10),
        rot in 0usize..10,
    ) {
        let truth: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let est: Vec<f64> = pairs.iter().map(|p| p.0 + p.1).collect();
        let mut t2 = truth.clone();
        let mut e2 = est.clone();
        let r = rot % t2.len();
        t2.rotate_left(r);
        e2.reverse();
        prop_assert_eq!(match_estimates(&truth, &est).unwrap(), match_estimates(&t2, &e2).unwrap());
    }
}
