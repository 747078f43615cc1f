//! Sample second-order statistics and redundancy averaging onto the
//! consecutive difference and sum lags.

use crate::geometry::CoarrayProfile;
use crate::synthesis::SnapshotMatrix;
use crate::{CMatrix, CVector, Error, Result, C64};

/// `(1/N) sum x(t) x(t)^H`, symmetrised to be exactly Hermitian.
pub fn sample_covariance(x: &SnapshotMatrix) -> Result<CMatrix> {
    let data = x.as_matrix();
    let n = data.ncols();
    if n == 0 {
        return Err(Error::EmptySnapshots);
    }
    let r = (data * data.adjoint()) / C64::from(n as f64);
    Ok((&r + r.adjoint()) * C64::from(0.5))
}

/// `(1/N) sum x(t) x(t)^T`, symmetrised to be exactly symmetric.
pub fn sample_pseudo_covariance(x: &SnapshotMatrix) -> Result<CMatrix> {
    let data = x.as_matrix();
    let n = data.ncols();
    if n == 0 {
        return Err(Error::EmptySnapshots);
    }
    let r = (data * data.transpose()) / C64::from(n as f64);
    Ok((&r + r.transpose()) * C64::from(0.5))
}

/// Averaged consecutive lag vectors.
///
/// `r_d` is indexed by difference lag `-(L1-1)/2 ..= (L1-1)/2` and `r_s` by
/// sum lag `delta_p .. delta_p + L2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagVectors {
    r_d: CVector,
    r_s: CVector,
    profile: CoarrayProfile,
}

impl LagVectors {
    pub fn new(r_d: CVector, r_s: CVector, profile: CoarrayProfile) -> Result<Self> {
        if r_d.len() != profile.l1() {
            return Err(Error::DimensionMismatch { expected: profile.l1(), actual: r_d.len() });
        }
        if r_s.len() != profile.l2() {
            return Err(Error::DimensionMismatch { expected: profile.l2(), actual: r_s.len() });
        }
        Ok(Self { r_d, r_s, profile })
    }

    pub fn r_d(&self) -> &CVector {
        &self.r_d
    }

    pub fn r_s(&self) -> &CVector {
        &self.r_s
    }

    pub fn profile(&self) -> &CoarrayProfile {
        &self.profile
    }

    /// `r_d` at difference lag `lag`, `|lag| <= (L1-1)/2`.
    pub fn diff(&self, lag: i64) -> C64 {
        let h = self.profile.max_diff_lag();
        debug_assert!(lag.abs() <= h);
        self.r_d[(lag + h) as usize]
    }

    /// `r_s` at absolute sum lag `lag` in `delta_p .. delta_p + L2`.
    pub fn sum(&self, lag: i64) -> C64 {
        let off = lag - self.profile.delta_p();
        debug_assert!(off >= 0 && (off as usize) < self.profile.l2());
        self.r_s[off as usize]
    }
}

fn check_dim(r: &CMatrix, profile: &CoarrayProfile) -> Result<()> {
    let m = profile.geometry().num_sensors();
    if r.nrows() != m || r.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: if r.nrows() != m { r.nrows() } else { r.ncols() },
        });
    }
    Ok(())
}

/// Mean of `R[i, j]` over pairs with `p_i - p_j = l`, for every lag of the
/// consecutive difference segment.
pub fn lag_average_difference(r: &CMatrix, profile: &CoarrayProfile) -> Result<CVector> {
    check_dim(r, profile)?;
    Ok(CVector::from_iterator(
        profile.l1(),
        profile.diff_segment().map(|l| mean_over(r, &profile.diff_lags()[&l])),
    ))
}

/// Mean of `Rp[u, v]` over pairs `u <= v` with `p_u + p_v = l`, for every lag
/// of the consecutive sum segment.
pub fn lag_average_sum(rp: &CMatrix, profile: &CoarrayProfile) -> Result<CVector> {
    check_dim(rp, profile)?;
    Ok(CVector::from_iterator(
        profile.l2(),
        profile.sum_segment().map(|l| mean_over(rp, &profile.sum_lags()[&l])),
    ))
}

fn mean_over(r: &CMatrix, pairs: &[(usize, usize)]) -> C64 {
    let total: C64 = pairs.iter().map(|&(i, j)| r[(i, j)]).sum();
    total / pairs.len() as f64
}

/// Both lag vectors from a covariance / pseudo-covariance pair.
pub fn lag_vectors(rxx: &CMatrix, rpseudo: &CMatrix, profile: &CoarrayProfile) -> Result<LagVectors> {
    LagVectors::new(
        lag_average_difference(rxx, profile)?,
        lag_average_sum(rpseudo, profile)?,
        profile.clone(),
    )
}
