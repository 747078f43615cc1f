//! Peak picking on a sampled pseudo-spectrum.

use crate::subspace::Spectrum;
use crate::{Error, Result};

/// Indices of local maxima.
///
/// A point (or a run of equal values, reported at its centre) is a maximum
/// when it is strictly larger than its neighbours; the grid ends compare
/// against their single neighbour.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut out = Vec::new();
    if n == 1 {
        out.push(0);
        return out;
    }
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        let left_ok = i == 0 || values[i - 1] < values[i];
        let right_ok = j == n - 1 || values[j + 1] < values[i];
        if left_ok && right_ok && !(i == 0 && j == n - 1) {
            out.push((i + j) / 2);
        }
        i = j + 1;
    }
    out
}

/// The `k` highest local maxima, returned as angles in ascending order.
pub fn find_peaks(spec: &Spectrum, k: usize) -> Result<Vec<f64>> {
    Ok(top_peaks(spec, k)?.into_iter().map(|i| spec.grid[i]).collect::<Vec<_>>())
}

/// Like [`find_peaks`] but refines each peak with a parabola through the
/// log-values of the peak and its two neighbours.
pub fn find_peaks_interpolated(spec: &Spectrum, k: usize) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = top_peaks(spec, k)?.into_iter().map(|i| refine(spec, i)).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn top_peaks(spec: &Spectrum, k: usize) -> Result<Vec<usize>> {
    let mut peaks = local_maxima(&spec.values);
    if peaks.len() < k {
        return Err(Error::InsufficientPeaks { found: peaks.len(), needed: k });
    }
    // stable: equal heights keep grid order
    peaks.sort_by(|&a, &b| spec.values[b].total_cmp(&spec.values[a]));
    peaks.truncate(k);
    peaks.sort_unstable();
    Ok(peaks)
}

fn refine(spec: &Spectrum, i: usize) -> f64 {
    if i == 0 || i + 1 >= spec.values.len() {
        return spec.grid[i];
    }
    let y = |j: usize| spec.values[j].max(f64::MIN_POSITIVE).ln();
    let (l, c, r) = (y(i - 1), y(i), y(i + 1));
    let denom = l - 2.0 * c + r;
    if denom >= 0.0 || !denom.is_finite() {
        return spec.grid[i];
    }
    let delta = (0.5 * (l - r) / denom).clamp(-0.5, 0.5);
    spec.grid[i] + delta * (spec.grid[i + 1] - spec.grid[i - 1]) / 2.0
}
