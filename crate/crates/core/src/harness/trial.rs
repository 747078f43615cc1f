use std::fmt;
use std::str::FromStr;

use crate::extended::{build_extended, oracle_extended, ExtendedCovariance};
use crate::geometry::coarray_profile;
use crate::lags::{lag_vectors, sample_covariance, sample_pseudo_covariance};
use crate::peaks::{find_peaks, find_peaks_interpolated};
use crate::subspace::{imusic_spectrum, noise_subspace, ul_spectrum, AngleGrid, Spectrum};
use crate::synthesis::{synthesize, Scenario};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimator {
    /// Determinant pseudo-spectrum.
    #[default]
    Imusic,
    /// Min-eigenvalue surrogate of the UL criterion.
    UlBaseline,
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "imusic" | "i-music" => Ok(Self::Imusic),
            "ul" | "ul_baseline" | "ul-baseline" => Ok(Self::UlBaseline),
            other => Err(Error::Config(format!("unknown estimator `{other}` (imusic | ul)"))),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Imusic => "imusic",
            Self::UlBaseline => "ul",
        })
    }
}

/// How many eigenvectors of `R_u` are assigned to the signal subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignalDim {
    /// `K`, one dimension per source.
    #[default]
    SourceCount,
    /// `K_nc + 2 K_c`, the rank of the noiseless `R_u`, capped at `dim - 2`.
    /// A circular source spans one direction in each diagonal block, so only
    /// this choice makes noiseless mixtures exact. With sampled statistics
    /// the determinant spectrum tends to grow false maxima beside circular
    /// sources. Once `K_c` reaches the bottom block size the bottom block
    /// holds no noise directions and the determinant vanishes at every angle.
    Rank,
}

impl SignalDim {
    pub fn resolve(self, scenario: &Scenario, ru_dim: usize) -> usize {
        let k = scenario.num_sources();
        match self {
            Self::SourceCount => k,
            Self::Rank => (k + scenario.num_circular()).min(ru_dim.saturating_sub(2)).max(k),
        }
    }
}

impl FromStr for SignalDim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rank" => Ok(Self::Rank),
            "count" | "sources" | "k" => Ok(Self::SourceCount),
            other => Err(Error::Config(format!("unknown signal dimension `{other}` (rank | count)"))),
        }
    }
}

impl fmt::Display for SignalDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rank => "rank",
            Self::SourceCount => "count",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOptions {
    pub grid: AngleGrid,
    pub estimator: Estimator,
    /// Use the exact population `R_u` instead of sampled statistics.
    pub population: bool,
    /// Parabolic peak refinement (off by default).
    pub interpolate: bool,
    pub signal_dim: SignalDim,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            grid: AngleGrid::default(),
            estimator: Estimator::Imusic,
            population: false,
            interpolate: false,
            signal_dim: SignalDim::SourceCount,
        }
    }
}

impl TrialOptions {
    pub fn with_grid_step(step: f64) -> Result<Self> {
        Ok(Self { grid: AngleGrid::with_step(step)?, ..Self::default() })
    }
}

/// `R_u` for one realisation, or the population matrix when `population` is set.
pub fn extended_from_scenario(
    scenario: &Scenario,
    n_snapshots: usize,
    seed: u64,
    population: bool,
) -> Result<ExtendedCovariance> {
    let profile = coarray_profile(scenario.geometry())?;
    if population {
        return oracle_extended(scenario, &profile);
    }
    let x = synthesize(scenario, n_snapshots, seed)?;
    let rxx = sample_covariance(&x)?;
    let rp = sample_pseudo_covariance(&x)?;
    build_extended(&lag_vectors(&rxx, &rp, &profile)?)
}

/// Spectrum for a noise subspace of dimension `dim - signal_dim`.
pub fn spectrum_from_extended(
    ru: &ExtendedCovariance,
    signal_dim: usize,
    grid: &AngleGrid,
    estimator: Estimator,
) -> Result<Spectrum> {
    let un = noise_subspace(ru, signal_dim)?;
    match estimator {
        Estimator::Imusic => imusic_spectrum(&un, ru.profile(), grid),
        Estimator::UlBaseline => ul_spectrum(&un, ru.profile(), grid),
    }
}

/// `k` DOA estimates (ascending) from an already assembled `R_u`.
pub fn estimate_from_extended(
    ru: &ExtendedCovariance,
    signal_dim: usize,
    k: usize,
    grid: &AngleGrid,
    estimator: Estimator,
    interpolate: bool,
) -> Result<Vec<f64>> {
    let spec = spectrum_from_extended(ru, signal_dim, grid, estimator)?;
    if interpolate {
        find_peaks_interpolated(&spec, k)
    } else {
        find_peaks(&spec, k)
    }
}

/// Full chain: synthesize, covariances, lag vectors, `R_u`, noise subspace
/// sized by `opts.signal_dim`, spectrum and the `K` highest peaks.
pub fn run_trial(
    scenario: &Scenario,
    n_snapshots: usize,
    seed: u64,
    opts: &TrialOptions,
) -> Result<Vec<f64>> {
    let k = scenario.num_sources();
    let ru = extended_from_scenario(scenario, n_snapshots, seed, opts.population)?;
    let dim = opts.signal_dim.resolve(scenario, ru.dim());
    estimate_from_extended(&ru, dim, k, &opts.grid, opts.estimator, opts.interpolate)
}

/// Pairs the i-th smallest estimate with the i-th smallest true angle and
/// returns `estimate - truth` in that order.
pub fn match_estimates(truth: &[f64], estimates: &[f64]) -> Result<Vec<f64>> {
    if truth.len() != estimates.len() {
        return Err(Error::LengthMismatch { truth: truth.len(), estimates: estimates.len() });
    }
    let mut t = truth.to_vec();
    let mut e = estimates.to_vec();
    t.sort_by(f64::total_cmp);
    e.sort_by(f64::total_cmp);
    Ok(e.iter().zip(&t).map(|(a, b)| a - b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::presets;
    use crate::geometry::nested_array;
    use crate::synthesis::{SourceKind, SourceSpec};

    #[test]
    fn matching_examples() {
        let err = match_estimates(&[-5.0, 5.0], &[-5.2, 5.1]).unwrap();
        assert!((err[0] + 0.2).abs() < 1e-12 && (err[1] - 0.1).abs() < 1e-12);
        assert_eq!(match_estimates(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
        let a = match_estimates(&[3.0, -1.0, 2.0], &[2.1, 3.2, -0.9]).unwrap();
        let b = match_estimates(&[-1.0, 2.0, 3.0], &[-0.9, 2.1, 3.2]).unwrap();
        assert_eq!(a, b);
        assert!(matches!(match_estimates(&[1.0], &[]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn estimator_parsing() {
        assert_eq!("imusic".parse::<Estimator>().unwrap(), Estimator::Imusic);
        assert_eq!("UL".parse::<Estimator>().unwrap(), Estimator::UlBaseline);
        assert!("esprit".parse::<Estimator>().is_err());
    }

    #[test]
    fn population_noncircular_trial_is_exact() {
        let layout: Vec<_> = presets::SIX_SOURCE_ANGLES.iter().map(|&t| (t, SourceKind::Bpsk)).collect();
        let sc = Scenario::with_snr(presets::nested_3_3(), presets::unit_power_sources(&layout), 10.0).unwrap();
        let opts = TrialOptions { population: true, ..TrialOptions::default() };
        assert_eq!(run_trial(&sc, 1, 0, &opts).unwrap(), sc.sorted_angles());
    }

    #[test]
    fn mixture_needs_rank_not_count() {
        let sc = presets::six_source_scenario(f64::INFINITY).unwrap();
        let count = TrialOptions { population: true, ..TrialOptions::default() };
        assert_ne!(run_trial(&sc, 1, 0, &count).unwrap(), sc.sorted_angles());
        let rank = TrialOptions { signal_dim: SignalDim::Rank, ..count };
        assert_eq!(run_trial(&sc, 1, 0, &rank).unwrap(), sc.sorted_angles());
    }

    #[test]
    fn circular_sources_filling_bottom_block_flatten_the_spectrum() {
        let geom = nested_array(3, 3).unwrap();
        let sources = [-4.0, 0.0, 4.0, 8.0].iter().map(|&t| SourceSpec::circular(t, 1.0)).collect();
        let sc = Scenario::new(geom, sources, 0.0).unwrap();
        let opts = TrialOptions { population: true, signal_dim: SignalDim::Rank, ..TrialOptions::default() };
        assert!(matches!(run_trial(&sc, 1, 0, &opts), Err(Error::InsufficientPeaks { found: 0, .. })));
    }

    #[test]
    fn signal_dim_resolution() {
        let six = presets::six_source_scenario(10.0).unwrap();
        assert_eq!(SignalDim::Rank.resolve(&six, 16), 8);
        assert_eq!(SignalDim::SourceCount.resolve(&six, 16), 6);
        let fourteen = presets::fourteen_source_scenario(20.0).unwrap();
        assert_eq!(SignalDim::Rank.resolve(&fourteen, 16), 14);
        assert_eq!("count".parse::<SignalDim>().unwrap(), SignalDim::SourceCount);
        assert!("auto".parse::<SignalDim>().is_err());
    }

    #[test]
    fn sampled_six_source_trial_is_accurate_and_deterministic() {
        let sc = presets::six_source_scenario(20.0).unwrap();
        let opts = TrialOptions::default();
        let a = run_trial(&sc, 2000, 42, &opts).unwrap();
        let b = run_trial(&sc, 2000, 42, &opts).unwrap();
        assert_eq!(a, b);
        for e in match_estimates(&sc.sorted_angles(), &a).unwrap() {
            assert!(e.abs() <= 1.0, "error {e}");
        }
    }
}
