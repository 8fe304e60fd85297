use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },
    #[error("expected a vector of length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("unsupported mode count {0} (1 or 2 modes)")]
    UnsupportedModes(usize),
    #[error("linear map is singular")]
    SingularMap,
    #[error("precision matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("precision matrix is not symmetric")]
    AsymmetricPrecision,
    #[error("invalid mode selection: keep must be a strict non-empty subset of the modes")]
    InvalidModeSelection,
    #[error("Fock order {n} exceeds the cap {cap}")]
    FockOrderTooLarge { n: u32, cap: u32 },
    #[error("invalid reflectivity {0}: need 0 <= r < 1")]
    InvalidReflectivity(f64),
    #[error("invalid input amplitude |alpha| = {0}")]
    InvalidAmplitude(f64),
    #[error("state is not normalized: integral = {0}")]
    Unnormalized(f64),
    #[error("detection outcome has vanishing probability {0:e}")]
    VanishingProbability(f64),
    #[error("minimum gain {0} must lie strictly between 1 and 2")]
    InvalidGainThreshold(f64),
    #[error("invalid optimization setting: {0}")]
    InvalidProblem(&'static str),
    #[error("no feasible starting point for minimum gain {0}")]
    Infeasible(f64),
    #[error("Fock cutoff {cutoff} too small: truncated norm deficit {deficit:e}")]
    CutoffTooSmall { cutoff: usize, deficit: f64 },
    #[error("beam splitter pushes {0:e} of the norm past the Fock cutoff")]
    BoundaryLeakage(f64),
    #[error("photon count {n} exceeds the Fock cutoff {cutoff}")]
    PhotonCountAboveCutoff { n: usize, cutoff: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
