//! Noise subspace of `R_u` and the pseudo-spectra built on it.
//!
//! For a look direction `theta` let `B(theta) = [[a1, 0], [0, w]]` with
//! `a1[m] = e^{-j w_theta m}` (`m < c`) and `w[n] = e^{+j w_theta (delta_p + n)}`
//! (`n < e`). Every source steers `R_u` inside the column span of `B` at
//! its own direction, whatever its noncircularity, so the 2x2 matrix
//! `G = B^H U_n U_n^H B` becomes singular there.
//!
//! * I-MUSIC: `P(theta) = 1 / det G(theta)`.
//! * UL baseline: `P(theta) = 1 / lambda_min G(theta)`.

use rayon::prelude::*;

use crate::extended::ExtendedCovariance;
use crate::geometry::{check_angle, CoarrayProfile};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Smallest determinant / eigenvalue used before inversion.
pub const DET_FLOOR: f64 = 1e-300;

/// Search grid of look directions in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    angles: Vec<f64>,
    step: f64,
}

impl Default for AngleGrid {
    /// -89.9 to 89.9 degrees in 0.1 degree steps.
    fn default() -> Self {
        Self::uniform(-89.9, 89.9, 0.1).expect("default grid is valid")
    }
}

impl AngleGrid {
    /// Points `k * step` for every integer `k` with `start <= k * step <= stop`.
    ///
    /// Points are generated from integer multiples so that, for example,
    /// `20.0` is hit exactly on a 0.1 degree grid.
    pub fn uniform(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::Config(format!("grid step must be positive, got {step}")));
        }
        check_angle(start)?;
        check_angle(stop)?;
        if start > stop {
            return Err(Error::Config(format!("grid start {start} exceeds stop {stop}")));
        }
        let inv = 1.0 / step;
        let exact_inverse = (inv - inv.round()).abs() < 1e-9;
        let point = |k: i64| if exact_inverse { k as f64 / inv.round() } else { k as f64 * step };
        let eps = 1e-9 * step;
        let k0 = ((start - eps) / step).ceil() as i64;
        let k1 = ((stop + eps) / step).floor() as i64;
        let angles: Vec<f64> = (k0..=k1).map(point).filter(|a| check_angle(*a).is_ok()).collect();
        if angles.is_empty() {
            return Err(Error::Config("grid has no points".into()));
        }
        Ok(Self { angles, step })
    }

    /// Full-range grid with the given step, endpoints one step inside +-90.
    pub fn with_step(step: f64) -> Result<Self> {
        let edge = 90.0 - step;
        Self::uniform(-edge, edge, step)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Orthonormal basis for the trailing eigenvectors of `R_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSubspace {
    basis: CMatrix,
    signal_dim: usize,
    top: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl NoiseSubspace {
    /// `(L2 + 1) x (L2 + 1 - K)`.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn signal_dim(&self) -> usize {
        self.signal_dim
    }

    /// All eigenvalues of `R_u`, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors matching [`Self::eigenvalues`], one per column.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// Top `c` rows of the basis.
    pub fn upper(&self) -> CMatrix {
        self.basis.rows(0, self.top).into_owned()
    }

    /// Bottom `e` rows of the basis.
    pub fn lower(&self) -> CMatrix {
        let e = self.basis.nrows() - self.top;
        self.basis.rows(self.top, e).into_owned()
    }

    /// `U_n U_n^H`.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }
}

/// Hermitian eigendecomposition of `R_u`; the noise subspace keeps the
/// `L2 + 1 - k` eigenvectors with the smallest eigenvalues.
///
/// `k` must lie in `1..=L2-1` so that at least two noise eigenvectors remain.
pub fn noise_subspace(ru: &ExtendedCovariance, k: usize) -> Result<NoiseSubspace> {
    let dim = ru.dim();
    let max = dim.saturating_sub(2);
    if k < 1 || k > max {
        return Err(Error::SignalDimension { k, max });
    }
    let eig = ru.matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    let basis = eigenvectors.columns(k, dim - k).into_owned();
    Ok(NoiseSubspace { basis, signal_dim: k, top: ru.top_block(), eigenvalues, eigenvectors })
}

/// The two-column block steering matrix `B(theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSteering {
    /// `a1(theta)`, length `c`.
    pub upper: CVector,
    /// `conj(a2(theta))` with `a2[n] = e^{-j w (delta_p + n)}`, length `e`.
    pub lower: CVector,
}

impl BlockSteering {
    pub fn new(theta_deg: f64, profile: &CoarrayProfile) -> Result<Self> {
        check_angle(theta_deg)?;
        let w = profile.geometry().phase_per_lag(theta_deg);
        let dp = profile.delta_p() as f64;
        let upper = CVector::from_fn(profile.top_block(), |m, _| C64::from_polar(1.0, -w * m as f64));
        let lower =
            CVector::from_fn(profile.bottom_block(), |n, _| C64::from_polar(1.0, w * (dp + n as f64)));
        Ok(Self { upper, lower })
    }

    /// Dense `(L2 + 1) x 2` form.
    pub fn matrix(&self) -> CMatrix {
        let (c, e) = (self.upper.len(), self.lower.len());
        let mut b = CMatrix::zeros(c + e, 2);
        b.view_mut((0, 0), (c, 1)).copy_from(&self.upper);
        b.view_mut((c, 1), (e, 1)).copy_from(&self.lower);
        b
    }
}

/// Entries of the Hermitian 2x2 matrix `G = B^H U_n U_n^H B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gram2 {
    pub g11: f64,
    pub g12: C64,
    pub g22: f64,
}

impl Gram2 {
    /// `g11 g22 - |g12|^2`, evaluated in real arithmetic.
    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12.norm_sqr()
    }

    pub fn lambda_max(&self) -> f64 {
        let mean = 0.5 * (self.g11 + self.g22);
        let half = 0.5 * (self.g11 - self.g22);
        mean + (half * half + self.g12.norm_sqr()).sqrt()
    }

    /// Computed as `det / lambda_max` to keep precision near zero.
    pub fn lambda_min(&self) -> f64 {
        let hi = self.lambda_max();
        if hi > 0.0 {
            (self.det() / hi).max(0.0)
        } else {
            0.0
        }
    }

    /// Unit eigenvector for `lambda_min`.
    pub fn null_vector(&self) -> [C64; 2] {
        let lo = self.lambda_min();
        // (G - lo I) v = 0, two candidate forms; take the better conditioned
        let v1 = [self.g12, C64::from(lo - self.g11)];
        let v2 = [C64::from(lo - self.g22), self.g12.conj()];
        let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
        let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if n == 0.0 {
            return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        }
        [v[0] / n, v[1] / n]
    }
}

/// Precomputed `U_n1^H` / `U_n2^H` for fast per-angle evaluation.
struct Projection {
    upper_h: CMatrix,
    lower_h: CMatrix,
}

impl Projection {
    fn new(un: &NoiseSubspace) -> Self {
        Self { upper_h: un.upper().adjoint(), lower_h: un.lower().adjoint() }
    }

    fn gram(&self, steer: &BlockSteering) -> Gram2 {
        let y1 = &self.upper_h * &steer.upper;
        let y2 = &self.lower_h * &steer.lower;
        Gram2 { g11: y1.norm_squared(), g12: y1.dotc(&y2), g22: y2.norm_squared() }
    }
}

/// `G(theta)` for one look direction.
pub fn gram_at(un: &NoiseSubspace, theta_deg: f64, profile: &CoarrayProfile) -> Result<Gram2> {
    check_profile(un, profile)?;
    Ok(Projection::new(un).gram(&BlockSteering::new(theta_deg, profile)?))
}

fn check_profile(un: &NoiseSubspace, profile: &CoarrayProfile) -> Result<()> {
    if un.basis.nrows() != profile.extended_dim() {
        return Err(Error::DimensionMismatch {
            expected: profile.extended_dim(),
            actual: un.basis.nrows(),
        });
    }
    Ok(())
}

/// Pseudo-spectrum sampled on an angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub grid_step: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid angle with the largest value (first one on ties).
    pub fn argmax(&self) -> Option<f64> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, _)| self.grid[i])
    }
}

fn evaluate<F>(un: &NoiseSubspace, profile: &CoarrayProfile, grid: &AngleGrid, f: F) -> Result<Spectrum>
where
    F: Fn(&Gram2) -> f64 + Sync,
{
    check_profile(un, profile)?;
    let proj = Projection::new(un);
    let values = grid
        .angles()
        .par_iter()
        .map(|&theta| {
            let steer = BlockSteering::new(theta, profile)?;
            let denom = f(&proj.gram(&steer)).max(DET_FLOOR);
            Ok(1.0 / denom)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Spectrum { grid: grid.angles().to_vec(), values, grid_step: grid.step() })
}

/// I-MUSIC pseudo-spectrum `1 / det(B^H U_n U_n^H B)`.
pub fn imusic_spectrum(un: &NoiseSubspace, profile: &CoarrayProfile, grid: &AngleGrid) -> Result<Spectrum> {
    evaluate(un, profile, grid, Gram2::det)
}

/// Baseline pseudo-spectrum `1 / lambda_min(B^H U_n U_n^H B)`.
pub fn ul_spectrum(un: &NoiseSubspace, profile: &CoarrayProfile, grid: &AngleGrid) -> Result<Spectrum> {
    evaluate(un, profile, grid, Gram2::lambda_min)
}

/// Outcome of noncircularity-coefficient recovery at a detected direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NcEstimate {
    /// Estimate of `rho e^{j psi}`.
    Coefficient(C64),
    /// Only the conjugate branch is nulled; the null vector is ~`[0, 1]`.
    CircularDominant,
    /// Both columns of `B` are nulled (`G ~ 0`), as for a circular source
    /// whose full rank-2 contribution sits in the signal subspace.
    FullyNulled,
}

/// Ratio `lambda_min / lambda_max` below which `G` counts as rank deficient.
pub const RANK_DEFICIENT_RATIO: f64 = 1e-3;
const NULL_EIGENVALUE: f64 = 1e-8;
const DIVISION_GUARD: f64 = 1e-8;

/// Reads `rho e^{j psi}` off the null vector of `G(theta_hat)`.
pub fn estimate_nc_coefficient(
    un: &NoiseSubspace,
    theta_hat: f64,
    profile: &CoarrayProfile,
) -> Result<NcEstimate> {
    let g = gram_at(un, theta_hat, profile)?;
    let hi = g.lambda_max();
    if hi < NULL_EIGENVALUE {
        return Ok(NcEstimate::FullyNulled);
    }
    let ratio = g.lambda_min() / hi;
    if ratio >= RANK_DEFICIENT_RATIO {
        return Err(Error::NotRankDeficient { ratio });
    }
    let [v1, v2] = g.null_vector();
    if v1.norm() <= DIVISION_GUARD {
        return Ok(NcEstimate::CircularDominant);
    }
    // null vector is proportional to [1, conj(rho e^{j psi})]
    Ok(NcEstimate::Coefficient((v2 / v1).conj()))
}
