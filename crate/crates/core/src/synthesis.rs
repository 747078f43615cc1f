//! Snapshot simulation and exact population covariances.
//!
//! Strictly noncircular sources (BPSK, PAM) carry a real symbol stream
//! rotated by `e^{j psi / 2}`, so that `E{s^2} = e^{j psi} E{|s|^2}`. Circular
//! sources are complex Gaussian with equal-variance independent I/Q parts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{check_angle, steering_vector, SparseArrayGeometry};
use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Bpsk,
    /// Real uniform alphabet `{±1, ±3, …}` with `levels` points, unit power.
    Pam { levels: u32 },
    CircularGaussian,
}

impl SourceKind {
    pub const DEFAULT_PAM_LEVELS: u32 = 4;

    pub fn is_noncircular(self) -> bool {
        !matches!(self, SourceKind::CircularGaussian)
    }

    /// Noncircularity rate: 1 for BPSK/PAM, 0 for circular Gaussian.
    pub fn noncircularity_rate(self) -> f64 {
        if self.is_noncircular() {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    /// Direction in degrees.
    pub theta: f64,
    /// Power `eta_k = E{|s_k|^2}`.
    pub power: f64,
    pub kind: SourceKind,
    /// Noncircularity phase `psi_k` in radians; ignored for circular sources.
    pub nc_phase: f64,
}

impl SourceSpec {
    pub fn bpsk(theta: f64, power: f64, nc_phase: f64) -> Self {
        Self { theta, power, kind: SourceKind::Bpsk, nc_phase }
    }

    pub fn pam(theta: f64, power: f64, nc_phase: f64, levels: u32) -> Self {
        Self { theta, power, kind: SourceKind::Pam { levels }, nc_phase }
    }

    pub fn circular(theta: f64, power: f64) -> Self {
        Self { theta, power, kind: SourceKind::CircularGaussian, nc_phase: 0.0 }
    }

    /// `rho e^{j psi}`, zero for circular sources.
    pub fn nc_coefficient(&self) -> C64 {
        C64::from_polar(self.kind.noncircularity_rate(), self.nc_phase)
    }

    fn validate(&self) -> Result<()> {
        check_angle(self.theta)?;
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "source power must be positive, got {}",
                self.power
            )));
        }
        if !self.nc_phase.is_finite() {
            return Err(Error::InvalidScenario("noncircular phase must be finite".into()));
        }
        if let SourceKind::Pam { levels } = self.kind {
            if levels < 2 || levels % 2 != 0 {
                return Err(Error::InvalidScenario(format!(
                    "PAM needs an even number of levels >= 2, got {levels}"
                )));
            }
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> C64 {
        let amp = self.power.sqrt();
        match self.kind {
            SourceKind::Bpsk => {
                let b = if rng.random::<bool>() { 1.0 } else { -1.0 };
                C64::from_polar(amp * b, 0.5 * self.nc_phase)
            }
            SourceKind::Pam { levels } => {
                let k = rng.random_range(0..levels);
                let level = 2.0 * f64::from(k) - f64::from(levels - 1);
                let norm = ((f64::from(levels).powi(2) - 1.0) / 3.0).sqrt();
                C64::from_polar(amp * level / norm, 0.5 * self.nc_phase)
            }
            SourceKind::CircularGaussian => complex_gaussian(rng, self.power),
        }
    }
}

fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> C64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

/// Array, sources and white noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    geometry: SparseArrayGeometry,
    sources: Vec<SourceSpec>,
    noise_power: f64,
}

impl Scenario {
    /// Sources must list every noncircular source before any circular one and
    /// have pairwise distinct angles.
    pub fn new(
        geometry: SparseArrayGeometry,
        sources: Vec<SourceSpec>,
        noise_power: f64,
    ) -> Result<Self> {
        for s in &sources {
            s.validate()?;
        }
        if !(noise_power.is_finite() && noise_power >= 0.0) {
            return Err(Error::InvalidScenario(format!(
                "noise power must be nonnegative, got {noise_power}"
            )));
        }
        if let Some(first_c) = sources.iter().position(|s| !s.kind.is_noncircular()) {
            if sources[first_c..].iter().any(|s| s.kind.is_noncircular()) {
                return Err(Error::InvalidScenario(
                    "noncircular sources must precede circular ones".into(),
                ));
            }
        }
        for (i, a) in sources.iter().enumerate() {
            if sources[i + 1..].iter().any(|b| a.theta == b.theta) {
                return Err(Error::InvalidScenario(format!("duplicate source angle {}", a.theta)));
            }
        }
        Ok(Self { geometry, sources, noise_power })
    }

    /// Equal-power sources at the given SNR in dB (`10 log10(power / sigma^2)`).
    pub fn with_snr(
        geometry: SparseArrayGeometry,
        sources: Vec<SourceSpec>,
        snr_db: f64,
    ) -> Result<Self> {
        let reference = sources.first().map_or(1.0, |s| s.power);
        Self::new(geometry, sources, reference / 10f64.powf(snr_db / 10.0))
    }

    pub fn geometry(&self) -> &SparseArrayGeometry {
        &self.geometry
    }

    pub fn sources(&self) -> &[SourceSpec] {
        &self.sources
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn num_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn num_circular(&self) -> usize {
        self.sources.iter().filter(|s| !s.kind.is_noncircular()).count()
    }

    /// True angles, ascending.
    pub fn sorted_angles(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.sources.iter().map(|s| s.theta).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Same sources with a different noise power.
    pub fn with_noise_power(&self, noise_power: f64) -> Result<Self> {
        Self::new(self.geometry.clone(), self.sources.clone(), noise_power)
    }
}

/// `M x N` matrix of array snapshots, one column per time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix(CMatrix);

impl SnapshotMatrix {
    pub fn new(data: CMatrix) -> Result<Self> {
        if data.ncols() == 0 || data.nrows() == 0 {
            return Err(Error::EmptySnapshots);
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidScenario("snapshot entries must be finite".into()));
        }
        Ok(Self(data))
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn num_sensors(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_snapshots(&self) -> usize {
        self.0.ncols()
    }
}

/// Simulates `x(t) = A s(t) + n(t)` for `t = 1..n_snapshots`.
///
/// Deterministic per seed. Per snapshot the draws are taken source by source
/// and then sensor by sensor for the noise.
pub fn synthesize(scenario: &Scenario, n_snapshots: usize, seed: u64) -> Result<SnapshotMatrix> {
    if n_snapshots == 0 {
        return Err(Error::EmptySnapshots);
    }
    let geom = scenario.geometry();
    let m = geom.num_sensors();
    let steering: Vec<_> = scenario
        .sources()
        .iter()
        .map(|s| steering_vector(geom, s.theta))
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = CMatrix::zeros(m, n_snapshots);
    let noise = scenario.noise_power();
    for t in 0..n_snapshots {
        let mut col = x.column_mut(t);
        for (src, a) in scenario.sources().iter().zip(&steering) {
            let s = src.draw(&mut rng);
            col.axpy(s, a, C64::new(1.0, 0.0));
        }
        if noise > 0.0 {
            for z in col.iter_mut() {
                *z += complex_gaussian(&mut rng, noise);
            }
        }
    }
    SnapshotMatrix::new(x)
}

/// Exact `R_xx = sum eta a a^H + sigma^2 I` and `R_xx* = sum rho e^{j psi} eta a a^T`.
pub fn population_covariances(scenario: &Scenario) -> (CMatrix, CMatrix) {
    let m = scenario.geometry().num_sensors();
    let mut rxx = CMatrix::identity(m, m) * C64::from(scenario.noise_power());
    let mut rp = CMatrix::zeros(m, m);
    for s in scenario.sources() {
        let a = steering_vector(scenario.geometry(), s.theta)
            .expect("scenario angles are validated on construction");
        rxx += (&a * a.adjoint()) * C64::from(s.power);
        let nc = s.nc_coefficient() * s.power;
        if nc != C64::new(0.0, 0.0) {
            rp += (&a * a.transpose()) * nc;
        }
    }
    (rxx, rp)
}
