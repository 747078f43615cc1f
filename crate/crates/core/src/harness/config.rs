//! Flat `key = value` run configuration.
//!
//! ```text
//! # array
//! positions = 1,2,3,4,8,12      # default: 3 + 3 nested array
//! spacing = 0.5                 # d / lambda
//!
//! # preset sources (six | fourteen); explicit source.* keys replace them
//! preset = six
//! source.1.theta = -25
//! source.1.kind = bpsk          # bpsk | pam | circular
//! source.1.power = 1
//! source.1.nc_phase = 0.3       # radians, default spread over [0, pi)
//! source.1.pam_levels = 4
//!
//! # single run
//! snr_db = 20
//! noise_power = 0.01            # overrides snr_db when present
//! snapshots = 2000
//! seed = 1
//! grid_step = 0.1
//! estimator = imusic            # imusic | ul
//! population = false
//! interpolate = false
//! signal_dim = count           # count (K) | rank (K + K_c)
//!
//! # sweeps
//! sweep.kind = snr              # snr | snapshots
//! sweep.values = -10:4:22       # start:step:stop or a comma list
//! trials = 500
//! master_seed = 1
//! ```
//!
//! Sources are put in canonical order (noncircular first, then by angle)
//! regardless of their numeric labels.

use std::collections::BTreeMap;
use std::path::Path;

use super::presets;
use super::sweep::{SweepConfig, SweepKind};
use super::trial::{Estimator, SignalDim, TrialOptions};
use crate::geometry::SparseArrayGeometry;
use crate::subspace::AngleGrid;
use crate::synthesis::{Scenario, SourceKind, SourceSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub positions: Vec<u32>,
    pub spacing: f64,
    pub sources: Vec<SourceSpec>,
    pub snr_db: f64,
    pub noise_power: Option<f64>,
    pub snapshots: usize,
    pub seed: u64,
    pub grid_step: f64,
    pub estimator: Estimator,
    pub population: bool,
    pub interpolate: bool,
    pub signal_dim: SignalDim,
    pub sweep_kind: SweepKind,
    pub sweep_values: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
}

impl Default for RunConfig {
    /// Six-source scenario on the 3 + 3 nested array, 20 dB, N = 2000, with
    /// the SNR sweep as the sweep setup.
    fn default() -> Self {
        let sweep = presets::snr_sweep();
        Self {
            positions: presets::nested_3_3().positions().to_vec(),
            spacing: crate::geometry::HALF_WAVELENGTH,
            sources: presets::six_source_sources(),
            snr_db: 20.0,
            noise_power: None,
            snapshots: 2000,
            seed: 1,
            grid_step: presets::DEFAULT_GRID_STEP,
            estimator: Estimator::Imusic,
            population: false,
            interpolate: false,
            signal_dim: SignalDim::SourceCount,
            sweep_kind: sweep.kind,
            sweep_values: sweep.values,
            trials: presets::DEFAULT_TRIALS,
            master_seed: 1,
        }
    }
}

/// Noncircular sources first, each class sorted by angle.
pub fn canonical_order(mut sources: Vec<SourceSpec>) -> Vec<SourceSpec> {
    sources.sort_by(|a, b| {
        (!a.kind.is_noncircular())
            .cmp(&!b.kind.is_noncircular())
            .then(a.theta.total_cmp(&b.theta))
    });
    sources
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("bad value `{value}` for `{key}`"))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(bad(key, value)),
    }
}

/// `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| bad("sweep.values", s)))
            .collect::<Result<_>>()?;
        let (start, step, stop) = (nums[0], nums[1], nums[2]);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(bad("sweep.values", s));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + step * i as f64).collect());
    }
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| bad("sweep.values", s)))
        .collect()
}

#[derive(Default)]
struct RawSource {
    theta: Option<f64>,
    kind: Option<String>,
    power: Option<f64>,
    nc_phase: Option<f64>,
    pam_levels: Option<u32>,
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = k.trim().to_ascii_lowercase();
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }

        let mut cfg = Self::default();
        if let Some(p) = entries.remove("preset") {
            cfg.apply_preset(&p)?;
        }

        let mut raw_sources: BTreeMap<u32, RawSource> = BTreeMap::new();
        for (key, value) in &entries {
            let v = value.as_str();
            if let Some(rest) = key.strip_prefix("source.") {
                let (idx, field) = rest
                    .split_once('.')
                    .ok_or_else(|| Error::Config(format!("malformed source key `{key}`")))?;
                let idx: u32 = parse_num(key, idx)?;
                let src = raw_sources.entry(idx).or_default();
                match field {
                    "theta" => src.theta = Some(parse_num(key, v)?),
                    "kind" => src.kind = Some(v.to_ascii_lowercase()),
                    "power" => src.power = Some(parse_num(key, v)?),
                    "nc_phase" => src.nc_phase = Some(parse_num(key, v)?),
                    "pam_levels" => src.pam_levels = Some(parse_num(key, v)?),
                    _ => return Err(Error::Config(format!("unknown source field `{key}`"))),
                }
                continue;
            }
            match key.as_str() {
                "positions" => cfg.positions = SparseArrayGeometry::parse_positions(v)?,
                "spacing" => cfg.spacing = parse_num(key, v)?,
                "snr_db" | "snr" => cfg.snr_db = parse_num(key, v)?,
                "noise_power" => cfg.noise_power = Some(parse_num(key, v)?),
                "snapshots" => cfg.snapshots = parse_num(key, v)?,
                "seed" => cfg.seed = parse_num(key, v)?,
                "grid_step" => cfg.grid_step = parse_num(key, v)?,
                "estimator" => cfg.estimator = v.parse()?,
                "population" => cfg.population = parse_bool(key, v)?,
                "interpolate" => cfg.interpolate = parse_bool(key, v)?,
                "signal_dim" => cfg.signal_dim = v.parse()?,
                "sweep.kind" => cfg.sweep_kind = v.parse()?,
                "sweep.values" => cfg.sweep_values = parse_values(v)?,
                "trials" => cfg.trials = parse_num(key, v)?,
                "master_seed" => cfg.master_seed = parse_num(key, v)?,
                _ => return Err(Error::Config(format!("unknown key `{key}`"))),
            }
        }
        if !raw_sources.is_empty() {
            cfg.sources = build_sources(raw_sources)?;
        }
        Ok(cfg)
    }

    /// `six` or `fourteen`; the latter also sets N = 12000 and 20 dB.
    pub fn apply_preset(&mut self, name: &str) -> Result<()> {
        match name.trim().to_ascii_lowercase().as_str() {
            "six" | "six_source" => {
                self.sources = presets::six_source_sources();
            }
            "fourteen" => {
                self.sources = presets::fourteen_source_sources();
                self.snapshots = presets::FOURTEEN_SOURCE_SNAPSHOTS;
                self.snr_db = presets::FOURTEEN_SOURCE_SNR_DB;
            }
            other => return Err(Error::Config(format!("unknown preset `{other}` (six | fourteen)"))),
        }
        self.positions = presets::nested_3_3().positions().to_vec();
        Ok(())
    }

    pub fn geometry(&self) -> Result<SparseArrayGeometry> {
        SparseArrayGeometry::with_spacing(self.positions.clone(), self.spacing)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let sources = canonical_order(self.sources.clone());
        match self.noise_power {
            Some(p) => Scenario::new(self.geometry()?, sources, p),
            None => Scenario::with_snr(self.geometry()?, sources, self.snr_db),
        }
    }

    pub fn trial_options(&self) -> Result<TrialOptions> {
        Ok(TrialOptions {
            grid: AngleGrid::with_step(self.grid_step)?,
            estimator: self.estimator,
            population: self.population,
            interpolate: self.interpolate,
            signal_dim: self.signal_dim,
        })
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let cfg = SweepConfig {
            geometry: self.geometry()?,
            sources: canonical_order(self.sources.clone()),
            kind: self.sweep_kind,
            values: self.sweep_values.clone(),
            fixed_snr_db: self.snr_db,
            fixed_snapshots: self.snapshots,
            trials: self.trials,
            master_seed: self.master_seed,
            grid_step: self.grid_step,
            estimator: self.estimator,
            population: self.population,
            signal_dim: self.signal_dim,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn build_sources(raw: BTreeMap<u32, RawSource>) -> Result<Vec<SourceSpec>> {
    let mut specs = Vec::with_capacity(raw.len());
    let mut explicit_phase = Vec::with_capacity(raw.len());
    for (idx, r) in raw {
        let theta = r.theta.ok_or_else(|| Error::Config(format!("source.{idx}.theta missing")))?;
        let kind = match r.kind.as_deref().unwrap_or("bpsk") {
            "bpsk" => SourceKind::Bpsk,
            "pam" => SourceKind::Pam { levels: r.pam_levels.unwrap_or(SourceKind::DEFAULT_PAM_LEVELS) },
            "circular" | "circular_gaussian" | "gaussian" => SourceKind::CircularGaussian,
            other => return Err(Error::Config(format!("source.{idx}.kind: unknown kind `{other}`"))),
        };
        specs.push(SourceSpec { theta, power: r.power.unwrap_or(1.0), kind, nc_phase: r.nc_phase.unwrap_or(0.0) });
        explicit_phase.push((theta, r.nc_phase.is_some()));
    }
    let specs = canonical_order(specs);
    let n_nc = specs.iter().filter(|s| s.kind.is_noncircular()).count();
    let phases = presets::default_nc_phases(n_nc);
    Ok(specs
        .into_iter()
        .enumerate()
        .map(|(i, mut s)| {
            let explicit = explicit_phase.iter().any(|&(t, e)| t == s.theta && e);
            if s.kind.is_noncircular() && !explicit {
                s.nc_phase = phases[i];
            }
            s
        })
        .collect())
}
