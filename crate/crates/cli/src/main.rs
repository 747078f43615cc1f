use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use imusic::geometry::coarray_profile;
use imusic::harness::{
    estimate_from_extended, extended_from_scenario, match_estimates, output, rmse_sweep,
    spectrum_from_extended, RunConfig,
};
use imusic::subspace::{estimate_nc_coefficient, noise_subspace, NcEstimate};

#[derive(Parser)]
#[command(name = "imusic", version, about = "DOA estimation for mixed circular/noncircular sources on sparse arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print L1, L2, delta_p and the lag tables of an array.
    Coarray {
        #[command(flatten)]
        common: Common,
        /// Also list every sensor pair behind each lag.
        #[arg(long)]
        pairs: bool,
    },
    /// Write the pseudo-spectrum of one run as CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Print the K estimated directions of one run.
    Resolve {
        #[command(flatten)]
        common: Common,
        /// Recover the noncircularity coefficient at each estimate.
        #[arg(long)]
        nc: bool,
    },
    /// Run a Monte Carlo RMSE sweep and write the report CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// snr | snapshots
        #[arg(long)]
        kind: Option<String>,
        /// `start:step:stop` or a comma list.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        master_seed: Option<u64>,
    },
}

#[derive(Args)]
struct Common {
    /// key = value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// six | fourteen
    #[arg(long)]
    preset: Option<String>,
    /// Sensor positions in units of d, e.g. 1,2,3,4,8,12.
    #[arg(long)]
    positions: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<f64>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_step: Option<f64>,
    /// imusic | ul
    #[arg(long)]
    estimator: Option<String>,
    /// Use the exact population R_u instead of simulated snapshots.
    #[arg(long)]
    population: bool,
    /// Parabolic refinement of peak locations.
    #[arg(long)]
    interpolate: bool,
    /// Signal subspace size: count (K) | rank (K + K_c)
    #[arg(long)]
    signal_dim: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.preset {
            cfg.apply_preset(p)?;
        }
        if let Some(p) = &self.positions {
            cfg.positions = imusic::geometry::SparseArrayGeometry::parse_positions(p)?;
        }
        if let Some(s) = self.snr {
            cfg.snr_db = s;
            cfg.noise_power = None;
        }
        if let Some(n) = self.snapshots {
            cfg.snapshots = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(g) = self.grid_step {
            cfg.grid_step = g;
        }
        if let Some(e) = &self.estimator {
            cfg.estimator = e.parse()?;
        }
        if let Some(d) = &self.signal_dim {
            cfg.signal_dim = d.parse()?;
        }
        cfg.population |= self.population;
        cfg.interpolate |= self.interpolate;
        Ok(cfg)
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Coarray { common, pairs } => coarray(&common.load()?, pairs),
        Command::Spectrum { common } => spectrum(&common),
        Command::Resolve { common, nc } => resolve(&common.load()?, nc),
        Command::Sweep { common, kind, values, trials, master_seed } => {
            let mut cfg = common.load()?;
            if let Some(k) = kind {
                cfg.sweep_kind = k.parse()?;
            }
            if let Some(v) = values {
                cfg.sweep_values = imusic::harness::config::parse_values(&v)?;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(m) = master_seed {
                cfg.master_seed = m;
            }
            sweep(&cfg, common.out)
        }
    }
}

fn coarray(cfg: &RunConfig, pairs: bool) -> Result<()> {
    let profile = coarray_profile(&cfg.geometry()?)?;
    let pos = cfg.positions.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    println!("positions {pos}");
    println!("L1 {}", profile.l1());
    println!("L2 {}", profile.l2());
    println!("delta_p {}", profile.delta_p());
    println!("R_u {0}x{0} (top {1}, bottom {2})", profile.extended_dim(), profile.top_block(), profile.bottom_block());
    let show = |name: &str, table: &std::collections::BTreeMap<i64, Vec<(usize, usize)>>| {
        println!("\n{name} lag,count{}", if pairs { ",pairs" } else { "" });
        for (lag, ps) in table {
            if pairs {
                let list = ps.iter().map(|(a, b)| format!("({a} {b})")).collect::<Vec<_>>().join(" ");
                println!("{lag},{},{list}", ps.len());
            } else {
                println!("{lag},{}", ps.len());
            }
        }
    };
    show("difference", profile.diff_lags());
    show("sum", profile.sum_lags());
    Ok(())
}

fn spectrum(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let sc = cfg.scenario()?;
    let opts = cfg.trial_options()?;
    let ru = extended_from_scenario(&sc, cfg.snapshots, cfg.seed, cfg.population)?;
    let dim = cfg.signal_dim.resolve(&sc, ru.dim());
    let spec = spectrum_from_extended(&ru, dim, &opts.grid, cfg.estimator)?;
    match &common.out {
        Some(path) => {
            let gp = output::write_spectrum(path, &spec, &sc.sorted_angles())
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} and {}", path.display(), gp.display());
        }
        None => print!("{}", output::spectrum_csv(&spec)),
    }
    Ok(())
}

fn resolve(cfg: &RunConfig, nc: bool) -> Result<()> {
    let sc = cfg.scenario()?;
    let opts = cfg.trial_options()?;
    let k = sc.num_sources();
    let ru = extended_from_scenario(&sc, cfg.snapshots, cfg.seed, cfg.population)?;
    let dim = cfg.signal_dim.resolve(&sc, ru.dim());
    let est = estimate_from_extended(&ru, dim, k, &opts.grid, cfg.estimator, cfg.interpolate)?;
    let truth = sc.sorted_angles();
    let errs = match_estimates(&truth, &est)?;
    let un = if nc { Some(noise_subspace(&ru, dim)?) } else { None };
    println!("estimate_deg,truth_deg,error_deg{}", if nc { ",nc" } else { "" });
    for ((e, t), err) in est.iter().zip(&truth).zip(&errs) {
        let extra = match &un {
            Some(un) => match estimate_nc_coefficient(un, *e, ru.profile()) {
                Ok(NcEstimate::Coefficient(z)) => format!(",{:.4}{:+.4}i", z.re, z.im),
                Ok(NcEstimate::CircularDominant) => ",circular".to_string(),
                Ok(NcEstimate::FullyNulled) => ",nulled".to_string(),
                Err(err) => format!(",{err}"),
            },
            None => String::new(),
        };
        println!("{e:.4},{t:.4},{err:+.4}{extra}");
    }
    Ok(())
}

fn sweep(cfg: &RunConfig, out: Option<PathBuf>) -> Result<()> {
    let report = rmse_sweep(&cfg.sweep_config()?)?;
    match out {
        Some(path) => {
            let gp = output::write_sweep(&path, &report).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} and {}", path.display(), gp.display());
        }
        None => print!("{}", output::sweep_csv(&report)),
    }
    Ok(())
}
