//! The extended covariance `R_u` assembled from the lag vectors.
//!
//! With `D(l)` the difference-lag value and `S(l)` the sum-lag value,
//! `c = (L1+1)/2` and `e = L2+1-c`, the blocks are (0-based indices)
//!
//! ```text
//! R1[m, n] = D(m - n)              c x c, Hermitian Toeplitz
//! R2[m, n] = S(delta_p + m + n)    c x e, Hankel over the whole sum segment
//! R3[m, n] = D(n - m)              e x e, Hermitian Toeplitz
//! R_u      = [[R1, R2], [R2^H, R3]]
//! ```
//!
//! `R3` runs its lags in the opposite direction to `R1`. That is what makes
//! `R_u = sum_k eta_k abar_k abar_k^H + sigma^2 I` hold exactly for strictly
//! noncircular sources, with `abar` from [`extended_steering`].

use crate::geometry::{check_angle, CoarrayProfile};
use crate::lags::LagVectors;
use crate::synthesis::Scenario;
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedCovariance {
    matrix: CMatrix,
    top: usize,
    bottom: usize,
    profile: CoarrayProfile,
}

impl ExtendedCovariance {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `c = (L1 + 1) / 2`.
    pub fn top_block(&self) -> usize {
        self.top
    }

    /// `e = L2 + 1 - c`.
    pub fn bottom_block(&self) -> usize {
        self.bottom
    }

    pub fn dim(&self) -> usize {
        self.top + self.bottom
    }

    pub fn profile(&self) -> &CoarrayProfile {
        &self.profile
    }

    pub fn r1(&self) -> CMatrix {
        self.matrix.view((0, 0), (self.top, self.top)).into_owned()
    }

    pub fn r2(&self) -> CMatrix {
        self.matrix.view((0, self.top), (self.top, self.bottom)).into_owned()
    }

    pub fn r3(&self) -> CMatrix {
        self.matrix.view((self.top, self.top), (self.bottom, self.bottom)).into_owned()
    }

    /// Same layout, every entry multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self { matrix: &self.matrix * C64::from(alpha), ..self.clone() }
    }
}

fn block_sizes(profile: &CoarrayProfile) -> Result<(usize, usize)> {
    let top = profile.l1().div_ceil(2);
    let dim = profile.l2() + 1;
    if top >= dim || dim - top > top {
        return Err(Error::ShapeViolation { top, bottom: dim.saturating_sub(top) });
    }
    Ok((top, dim - top))
}

/// Assembles `R_u` from averaged lag vectors.
pub fn build_extended(lags: &LagVectors) -> Result<ExtendedCovariance> {
    let profile = lags.profile();
    let (c, e) = block_sizes(profile)?;
    let dp = profile.delta_p();
    let mut r = CMatrix::zeros(c + e, c + e);
    for m in 0..c {
        for n in 0..c {
            r[(m, n)] = lags.diff(m as i64 - n as i64);
        }
        for n in 0..e {
            let s = lags.sum(dp + (m + n) as i64);
            r[(m, c + n)] = s;
            r[(c + n, m)] = s.conj();
        }
    }
    for m in 0..e {
        for n in 0..e {
            r[(c + m, c + n)] = lags.diff(n as i64 - m as i64);
        }
    }
    // r_d is only conjugate symmetric up to sampling error; force exact Hermitian
    let matrix = (&r + r.adjoint()) * C64::from(0.5);
    Ok(ExtendedCovariance { matrix, top: c, bottom: e, profile: profile.clone() })
}

/// Extended steering vector `abar(theta)` of length `L2 + 1`.
///
/// Top block `exp(-j w m)` for `m = 0..c`; bottom block
/// `conj(nc) exp(+j w (delta_p + n))` for `n = 0..e`, where
/// `w = 2 pi (d/lambda) sin theta` and `nc = rho e^{j psi}`.
pub fn extended_steering(theta_deg: f64, nc: C64, profile: &CoarrayProfile) -> Result<CVector> {
    check_angle(theta_deg)?;
    let (c, e) = block_sizes(profile)?;
    let w = profile.geometry().phase_per_lag(theta_deg);
    let dp = profile.delta_p() as f64;
    let nc = nc.conj();
    Ok(CVector::from_iterator(
        c + e,
        (0..c)
            .map(|m| C64::from_polar(1.0, -w * m as f64))
            .chain((0..e).map(|n| nc * C64::from_polar(1.0, w * (dp + n as f64)))),
    ))
}

/// Population-level `R_u` straight from the source parameters.
///
/// Evaluates `D(l) = sum eta e^{-j w l} + sigma^2 [l = 0]` and
/// `S(l) = sum rho e^{j psi} eta e^{-j w l}` in closed form, without going
/// through sensor covariances or lag averaging.
pub fn oracle_extended(scenario: &Scenario, profile: &CoarrayProfile) -> Result<ExtendedCovariance> {
    let (c, e) = block_sizes(profile)?;
    let geom = profile.geometry();
    let terms: Vec<(f64, f64, C64)> = scenario
        .sources()
        .iter()
        .map(|s| (geom.phase_per_lag(s.theta), s.power, s.nc_coefficient()))
        .collect();
    let sigma2 = scenario.noise_power();
    let d = |l: i64| -> C64 {
        let mut acc: C64 = terms.iter().map(|&(w, eta, _)| C64::from_polar(eta, -w * l as f64)).sum();
        if l == 0 {
            acc += sigma2;
        }
        acc
    };
    let s = |l: i64| -> C64 {
        terms.iter().map(|&(w, eta, nc)| nc * C64::from_polar(eta, -w * l as f64)).sum()
    };
    let dp = profile.delta_p();
    let matrix = CMatrix::from_fn(c + e, c + e, |i, j| {
        let (i, j) = (i as i64, j as i64);
        let c = c as i64;
        match (i < c, j < c) {
            (true, true) => d(i - j),
            (true, false) => s(dp + i + j - c),
            (false, true) => s(dp + j + i - c).conj(),
            (false, false) => d(j - i),
        }
    });
    Ok(ExtendedCovariance { matrix, top: c, bottom: e, profile: profile.clone() })
}
