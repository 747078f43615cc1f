use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::trial::{match_estimates, run_trial, Estimator, SignalDim, TrialOptions};
use crate::geometry::SparseArrayGeometry;
use crate::subspace::AngleGrid;
use crate::synthesis::{Scenario, SourceSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Sweep values are SNRs in dB at `fixed_snapshots`.
    Snr,
    /// Sweep values are snapshot counts at `fixed_snr_db`.
    Snapshots,
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "snr" => Ok(Self::Snr),
            "snapshots" | "n" => Ok(Self::Snapshots),
            other => Err(Error::Config(format!("unknown sweep kind `{other}` (snr | snapshots)"))),
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Snr => "snr",
            Self::Snapshots => "snapshots",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub geometry: SparseArrayGeometry,
    /// Equal-power source template; the noise level follows from the SNR.
    pub sources: Vec<SourceSpec>,
    pub kind: SweepKind,
    pub values: Vec<f64>,
    pub fixed_snr_db: f64,
    pub fixed_snapshots: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub grid_step: f64,
    pub estimator: Estimator,
    pub population: bool,
    pub signal_dim: SignalDim,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep values must be nonempty".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sweep values must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.kind == SweepKind::Snapshots
            && self.values.iter().any(|&v| v < 1.0 || v.fract() != 0.0)
        {
            return Err(Error::Config("snapshot sweep values must be positive integers".into()));
        }
        if self.kind == SweepKind::Snr && self.fixed_snapshots == 0 {
            return Err(Error::Config("fixed snapshot count must be >= 1".into()));
        }
        AngleGrid::with_step(self.grid_step)?;
        self.scenario_at(0)?;
        Ok(())
    }

    /// Scenario and snapshot count for sweep point `index`.
    pub fn scenario_at(&self, index: usize) -> Result<(Scenario, usize)> {
        let v = self.values[index];
        let (snr, n) = match self.kind {
            SweepKind::Snr => (v, self.fixed_snapshots),
            SweepKind::Snapshots => (self.fixed_snr_db, v as usize),
        };
        Ok((Scenario::with_snr(self.geometry.clone(), self.sources.clone(), snr)?, n))
    }

    fn trial_options(&self) -> Result<TrialOptions> {
        Ok(TrialOptions {
            grid: AngleGrid::with_step(self.grid_step)?,
            estimator: self.estimator,
            population: self.population,
            interpolate: false,
            signal_dim: self.signal_dim,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub sweep_value: f64,
    /// RMSE in degrees over successful trials; NaN when none succeeded.
    pub rmse_deg: f64,
    pub trials: usize,
    pub failures: usize,
    pub mean_runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub kind: SweepKind,
    pub points: Vec<SweepPoint>,
}

/// Result of one trial, keyed by its position in the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub sweep_index: usize,
    pub trial_index: usize,
    /// Matched signed errors, `None` for an unresolved trial.
    pub errors: Option<Vec<f64>>,
    pub runtime_ms: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed. Injective in `(sweep_index, trial_index)` for indices
/// below `2^32`: every step is a bijection on `u64`.
pub fn trial_seed(master_seed: u64, sweep_index: usize, trial_index: usize) -> u64 {
    let key = ((sweep_index as u64) << 32) | (trial_index as u64 & 0xFFFF_FFFF);
    splitmix64(master_seed ^ splitmix64(key))
}

/// Reduces trial outcomes into per-point statistics.
///
/// Outcomes are ordered by `(sweep_index, trial_index)` before summation, so
/// the report does not depend on completion order.
pub fn aggregate(kind: SweepKind, values: &[f64], outcomes: &[TrialOutcome]) -> SweepReport {
    let mut sorted: Vec<&TrialOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| (o.sweep_index, o.trial_index));
    let points = values
        .iter()
        .enumerate()
        .map(|(idx, &sweep_value)| {
            let here: Vec<&&TrialOutcome> = sorted.iter().filter(|o| o.sweep_index == idx).collect();
            let mut sq = 0.0;
            let mut count = 0usize;
            let mut failures = 0usize;
            let mut runtime = 0.0;
            for o in &here {
                runtime += o.runtime_ms;
                match &o.errors {
                    Some(errs) => {
                        for e in errs {
                            sq += e * e;
                            count += 1;
                        }
                    }
                    None => failures += 1,
                }
            }
            let trials = here.len();
            SweepPoint {
                sweep_value,
                rmse_deg: if count > 0 { (sq / count as f64).sqrt() } else { f64::NAN },
                trials,
                failures,
                mean_runtime_ms: if trials > 0 { runtime / trials as f64 } else { 0.0 },
            }
        })
        .collect();
    SweepReport { kind, points }
}

/// Runs `trials` seeded trials per sweep value (in parallel) and reports
/// RMSE over the successful ones with failures counted separately.
pub fn rmse_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let opts = config.trial_options()?;
    let jobs: Vec<(usize, usize)> = (0..config.values.len())
        .flat_map(|s| (0..config.trials).map(move |t| (s, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(s, t)| {
            let (scenario, n) = config.scenario_at(s)?;
            let seed = trial_seed(config.master_seed, s, t);
            let start = Instant::now();
            let result = run_trial(&scenario, n, seed, &opts);
            let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            let errors = match result {
                Ok(est) => Some(match_estimates(&scenario.sorted_angles(), &est)?),
                Err(Error::InsufficientPeaks { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(TrialOutcome { sweep_index: s, trial_index: t, errors, runtime_ms })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(config.kind, &config.values, &outcomes))
}
