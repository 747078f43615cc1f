//! Direction-of-arrival estimation for mixtures of circular and noncircular
//! narrowband sources received on sparse linear arrays.
//!
//! The crate follows the processing chain of the improved MUSIC (I-MUSIC)
//! estimator:
//!
//! 1. [`geometry`]: sensor positions, the difference and sum coarrays and the
//!    consecutive lag segments that size everything downstream.
//! 2. [`synthesis`]: snapshot simulation for BPSK, PAM and circular Gaussian
//!    sources plus exact population covariances used as oracles.
//! 3. [`lags`]: sample covariance / pseudo-covariance and lag averaging into
//!    the difference vector `r_d` and the sum vector `r_s`.
//! 4. [`extended`]: the Toeplitz/Hankel extended covariance `R_u`.
//! 5. [`subspace`] and [`peaks`]: noise subspace, the determinant
//!    pseudo-spectrum, a min-eigenvalue baseline and peak picking.
//! 6. [`harness`]: trial runner, Monte Carlo sweeps, config files and CSV
//!    output.
//!
//! ```
//! use imusic::prelude::*;
//!
//! let geom = nested_array(3, 3).unwrap();
//! let profile = coarray_profile(&geom).unwrap();
//! assert_eq!((profile.l1(), profile.l2(), profile.delta_p()), (23, 15, 2));
//! ```
//!
//! The `book/` directory at the repository root walks through each stage;
//! its code listings are compiled and run as doctests of this crate.

pub mod error;
pub mod extended;
pub mod geometry;
pub mod harness;
pub mod lags;
pub mod peaks;
pub mod subspace;
pub mod synthesis;

pub use error::{Error, Result};

/// Complex sample type used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

pub mod prelude {
    pub use crate::extended::{build_extended, extended_steering, oracle_extended, ExtendedCovariance};
    pub use crate::geometry::{
        coarray_profile, nested_array, steering_vector, CoarrayProfile, SparseArrayGeometry,
    };
    pub use crate::harness::{
        match_estimates, rmse_sweep, run_trial, Estimator, SweepConfig, SweepKind, SweepReport,
        TrialOptions,
    };
    pub use crate::lags::{
        lag_average_difference, lag_average_sum, lag_vectors, sample_covariance,
        sample_pseudo_covariance, LagVectors,
    };
    pub use crate::peaks::find_peaks;
    pub use crate::subspace::{
        estimate_nc_coefficient, imusic_spectrum, noise_subspace, ul_spectrum, AngleGrid,
        NcEstimate, NoiseSubspace, Spectrum,
    };
    pub use crate::synthesis::{
        population_covariances, synthesize, Scenario, SnapshotMatrix, SourceKind, SourceSpec,
    };
    pub use crate::{CMatrix, CVector, Error, C64};
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/coarrays.md")]
    mod coarrays {}
    #[doc = include_str!("../../../book/src/signal_model.md")]
    mod signal_model {}
    #[doc = include_str!("../../../book/src/lag_vectors.md")]
    mod lag_vectors {}
    #[doc = include_str!("../../../book/src/extended_covariance.md")]
    mod extended_covariance {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
