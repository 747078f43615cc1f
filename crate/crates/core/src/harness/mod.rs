//! Experiment plumbing: single trials, Monte Carlo sweeps, presets, config
//! files and CSV output.

pub mod config;
pub mod output;
pub mod presets;
mod sweep;
mod trial;

pub use config::RunConfig;
pub use sweep::{aggregate, rmse_sweep, trial_seed, SweepConfig, SweepKind, SweepPoint, SweepReport, TrialOutcome};
pub use trial::{
    estimate_from_extended, extended_from_scenario, match_estimates, run_trial, spectrum_from_extended,
    Estimator, SignalDim, TrialOptions,
};
