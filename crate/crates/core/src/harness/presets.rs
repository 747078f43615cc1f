//! Built-in experiment setups on the six-sensor (3 + 3) nested array.

use std::f64::consts::PI;

use super::sweep::{SweepConfig, SweepKind};
use super::trial::{Estimator, SignalDim};
use crate::geometry::{nested_array, SparseArrayGeometry};
use crate::synthesis::{Scenario, SourceKind, SourceSpec};
use crate::Result;

pub const FOURTEEN_SOURCE_SNAPSHOTS: usize = 12_000;
pub const FOURTEEN_SOURCE_SNR_DB: f64 = 20.0;
pub const SIX_SOURCE_ANGLES: [f64; 6] = [-25.0, -15.0, -5.0, 5.0, 15.0, 25.0];
pub const DEFAULT_TRIALS: usize = 500;
pub const DEFAULT_GRID_STEP: f64 = 0.1;

pub fn nested_3_3() -> SparseArrayGeometry {
    nested_array(3, 3).expect("3 + 3 nested array is valid")
}

/// Phases `pi j / n` for `j = 0..n`: distinct values spread over `[0, pi)`.
pub fn default_nc_phases(n: usize) -> Vec<f64> {
    (0..n).map(|j| PI * j as f64 / n as f64).collect()
}

/// Builds unit-power sources from `(theta, kind)` pairs in canonical order
/// (noncircular first, then by angle), assigning [`default_nc_phases`] in
/// that order.
pub fn unit_power_sources(spec: &[(f64, SourceKind)]) -> Vec<SourceSpec> {
    let mut ordered: Vec<(f64, SourceKind)> = spec.to_vec();
    ordered.sort_by(|a, b| {
        (!a.1.is_noncircular()).cmp(&!b.1.is_noncircular()).then(a.0.total_cmp(&b.0))
    });
    let n_nc = ordered.iter().filter(|(_, k)| k.is_noncircular()).count();
    let phases = default_nc_phases(n_nc);
    ordered
        .into_iter()
        .enumerate()
        .map(|(i, (theta, kind))| SourceSpec {
            theta,
            power: 1.0,
            kind,
            nc_phase: if kind.is_noncircular() { phases[i] } else { 0.0 },
        })
        .collect()
}

/// Fourteen sources 7 degrees apart starting at -44: ten BPSK, one 4-PAM
/// (at -9) and three circular Gaussian (at -30, 5 and 40).
pub fn fourteen_source_sources() -> Vec<SourceSpec> {
    let layout: Vec<(f64, SourceKind)> = (0..14)
        .map(|i| {
            let theta = -44.0 + 7.0 * f64::from(i);
            let kind = match i {
                2 | 7 | 12 => SourceKind::CircularGaussian,
                5 => SourceKind::Pam { levels: SourceKind::DEFAULT_PAM_LEVELS },
                _ => SourceKind::Bpsk,
            };
            (theta, kind)
        })
        .collect();
    unit_power_sources(&layout)
}

pub fn fourteen_source_scenario(snr_db: f64) -> Result<Scenario> {
    Scenario::with_snr(nested_3_3(), fourteen_source_sources(), snr_db)
}

/// Angles -25..25 step 10: BPSK at -25, -15, -5; 4-PAM at 5; circular at 15 and 25.
pub fn six_source_sources() -> Vec<SourceSpec> {
    let kinds = [
        SourceKind::Bpsk,
        SourceKind::Bpsk,
        SourceKind::Bpsk,
        SourceKind::Pam { levels: SourceKind::DEFAULT_PAM_LEVELS },
        SourceKind::CircularGaussian,
        SourceKind::CircularGaussian,
    ];
    let layout: Vec<_> = SIX_SOURCE_ANGLES.iter().copied().zip(kinds).collect();
    unit_power_sources(&layout)
}

pub fn six_source_scenario(snr_db: f64) -> Result<Scenario> {
    Scenario::with_snr(nested_3_3(), six_source_sources(), snr_db)
}

/// RMSE versus SNR: -10..=22 dB in 4 dB steps, N = 2000.
pub fn snr_sweep() -> SweepConfig {
    SweepConfig {
        geometry: nested_3_3(),
        sources: six_source_sources(),
        kind: SweepKind::Snr,
        values: (0..9).map(|i| -10.0 + 4.0 * f64::from(i)).collect(),
        fixed_snr_db: 10.0,
        fixed_snapshots: 2000,
        trials: DEFAULT_TRIALS,
        master_seed: 1,
        grid_step: DEFAULT_GRID_STEP,
        estimator: Estimator::Imusic,
        population: false,
        signal_dim: SignalDim::SourceCount,
    }
}

/// RMSE versus snapshot count: N = 200..=2300 in steps of 300 at 10 dB.
pub fn snapshot_sweep() -> SweepConfig {
    SweepConfig {
        kind: SweepKind::Snapshots,
        values: (0..8).map(|i| 200.0 + 300.0 * f64::from(i)).collect(),
        ..snr_sweep()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourteen_source_layout() {
        let s = fourteen_source_sources();
        assert_eq!(s.len(), 14);
        assert_eq!(s.iter().filter(|x| x.kind == SourceKind::Bpsk).count(), 10);
        assert_eq!(s.iter().filter(|x| matches!(x.kind, SourceKind::Pam { .. })).count(), 1);
        assert_eq!(s.iter().filter(|x| x.kind == SourceKind::CircularGaussian).count(), 3);
        let sc = fourteen_source_scenario(FOURTEEN_SOURCE_SNR_DB).unwrap();
        let angles = sc.sorted_angles();
        assert_eq!(angles[0], -44.0);
        assert!(angles.windows(2).all(|w| (w[1] - w[0] - 7.0).abs() < 1e-12));
        assert!((sc.noise_power() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn six_source_layout() {
        let sc = six_source_scenario(10.0).unwrap();
        assert_eq!(sc.sorted_angles(), SIX_SOURCE_ANGLES.to_vec());
        assert_eq!(sc.num_circular(), 2);
        let phases: Vec<f64> = sc.sources().iter().take(4).map(|s| s.nc_phase).collect();
        assert_eq!(phases, default_nc_phases(4));
    }

    #[test]
    fn sweep_presets() {
        assert_eq!(snr_sweep().values, vec![-10.0, -6.0, -2.0, 2.0, 6.0, 10.0, 14.0, 18.0, 22.0]);
        let s = snapshot_sweep();
        assert_eq!(s.values.first(), Some(&200.0));
        assert_eq!(s.values.last(), Some(&2300.0));
        assert!(snr_sweep().validate().is_ok());
    }
}
