use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("degenerate coarray profile: L1 = {l1}, L2 = {l2}")]
    DegenerateProfile { l1: usize, l2: usize },

    #[error("angle {0} deg is outside the open interval (-90, 90)")]
    AngleOutOfRange(f64),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("snapshot matrix is empty")]
    EmptySnapshots,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("extended covariance shape violation: bottom block size {bottom} must be in 1..={top}")]
    ShapeViolation { top: usize, bottom: usize },

    #[error("signal dimension {k} outside the resolvable range 1..={max}")]
    SignalDimension { k: usize, max: usize },

    #[error("insufficient peaks: found {found}, need {needed}")]
    InsufficientPeaks { found: usize, needed: usize },

    #[error("G(theta) is not rank deficient: eigenvalue ratio {ratio:.3e}")]
    NotRankDeficient { ratio: f64 },

    #[error("length mismatch: {truth} true angles vs {estimates} estimates")]
    LengthMismatch { truth: usize, estimates: usize },

    #[error("invalid config: {0}")]
    Config(String),
}
