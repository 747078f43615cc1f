//! CSV writers and matching gnuplot scripts.
//!
//! Floats are written with `{:.16e}` (17 significant digits), which
//! round-trips every `f64`.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use super::sweep::{SweepKind, SweepReport};
use crate::subspace::Spectrum;

pub const SPECTRUM_HEADER: &str = "theta_deg,p_value";
pub const SWEEP_HEADER: &str = "sweep_value,rmse_deg,trials,failures,mean_runtime_ms";

pub fn spectrum_csv(spec: &Spectrum) -> String {
    let mut s = String::with_capacity(48 * spec.len() + 32);
    s.push_str(SPECTRUM_HEADER);
    s.push('\n');
    for (t, p) in spec.grid.iter().zip(&spec.values) {
        let _ = writeln!(s, "{t:.16e},{p:.16e}");
    }
    s
}

pub fn sweep_csv(report: &SweepReport) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for p in &report.points {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{},{},{:.16e}",
            p.sweep_value, p.rmse_deg, p.trials, p.failures, p.mean_runtime_ms
        );
    }
    s
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

/// `foo.csv` -> `foo.gp`.
pub fn script_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

pub fn spectrum_script(csv: &Path, truth: &[f64]) -> String {
    let name = file_name(csv);
    let png = file_name(&csv.with_extension("png"));
    let mut s = format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,500\n\
         set output '{png}'\n\
         set xlabel 'theta (deg)'\n\
         set ylabel 'P (dB)'\n\
         set grid\n"
    );
    for t in truth {
        let _ = writeln!(s, "set arrow from {t},graph 0 to {t},graph 1 nohead dt 2 lc rgb 'gray'");
    }
    let _ = writeln!(s, "plot '{name}' skip 1 using 1:(10*log10($2)) with lines notitle");
    s
}

pub fn sweep_script(csv: &Path, kind: SweepKind) -> String {
    let name = file_name(csv);
    let png = file_name(&csv.with_extension("png"));
    let xlabel = match kind {
        SweepKind::Snr => "SNR (dB)",
        SweepKind::Snapshots => "snapshots",
    };
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,500\n\
         set output '{png}'\n\
         set xlabel '{xlabel}'\n\
         set ylabel 'RMSE (deg)'\n\
         set logscale y\n\
         set grid\n\
         plot '{name}' skip 1 using 1:2 with linespoints notitle\n"
    )
}

/// Writes the CSV and its `.gp` script; returns the script path.
pub fn write_spectrum(csv: &Path, spec: &Spectrum, truth: &[f64]) -> io::Result<PathBuf> {
    std::fs::write(csv, spectrum_csv(spec))?;
    let gp = script_path(csv);
    std::fs::write(&gp, spectrum_script(csv, truth))?;
    Ok(gp)
}

pub fn write_sweep(csv: &Path, report: &SweepReport) -> io::Result<PathBuf> {
    std::fs::write(csv, sweep_csv(report))?;
    let gp = script_path(csv);
    std::fs::write(&gp, sweep_script(csv, report.kind))?;
    Ok(gp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::SweepPoint;

    #[test]
    fn spectrum_round_trips() {
        let spec = Spectrum { grid: vec![-0.1, 0.0, 0.1], values: vec![1.0 / 3.0, 2.5e12, 7e-300], grid_step: 0.1 };
        let csv = spectrum_csv(&spec);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(SPECTRUM_HEADER));
        for (line, (t, p)) in lines.zip(spec.grid.iter().zip(&spec.values)) {
            let (a, b) = line.split_once(',').unwrap();
            assert_eq!(a.parse::<f64>().unwrap().to_bits(), t.to_bits());
            assert_eq!(b.parse::<f64>().unwrap().to_bits(), p.to_bits());
        }
    }

    #[test]
    fn sweep_rows() {
        let report = SweepReport {
            kind: SweepKind::Snr,
            points: vec![SweepPoint { sweep_value: -10.0, rmse_deg: f64::NAN, trials: 5, failures: 5, mean_runtime_ms: 1.5 }],
        };
        let csv = sweep_csv(&report);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), 5);
        assert!(row[1].parse::<f64>().unwrap().is_nan());
        assert_eq!(row[2], "5");
        assert!(sweep_script(Path::new("out/rmse.csv"), SweepKind::Snr).contains("'rmse.csv'"));
        assert_eq!(script_path(Path::new("a/b.csv")), PathBuf::from("a/b.gp"));
    }
}
