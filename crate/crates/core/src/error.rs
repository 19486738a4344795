//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors reported by state construction, gate application and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("site {site} out of range for {num_sites} sites")]
    SiteOutOfRange { site: usize, num_sites: usize },

    #[error("at most {max} sites supported (got {requested})")]
    TooManySites { requested: usize, max: usize },

    #[error("amplitude array has length {len}, expected 2^{num_sites}")]
    DimensionMismatch { len: usize, num_sites: usize },

    #[error("amplitudes must be finite")]
    NonFiniteAmplitude,

    #[error("gate is not unitary (max deviation {deviation:.3e})")]
    NonUnitaryGate { deviation: f64 },

    #[error("control set contains the target site {site}")]
    ControlTargetOverlap { site: usize },

    #[error("left partition must be a proper nonempty subset of the sites")]
    InvalidBipartition,

    #[error("state is not normalized (squared norm {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("ensemble needs at least two sites (got {0})")]
    EnsembleTooSmall(usize),

    #[error("coefficients at site {site} violate |A|^2+|B|^2 = 1 (got {norm_sq})")]
    UnnormalizedCoefficients { site: usize, norm_sq: f64 },

    #[error(
        "degenerate transform at site {site}: |A| = {magnitude} lies on the unit interval boundary"
    )]
    DegenerateTransform { site: usize, magnitude: f64 },

    #[error("parameter {name} = {value} outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("post-selection annihilated the state (success rate {rate:.3e})")]
    PostSelectionAnnihilated { rate: f64 },

    #[error("operation requires a state in the {expected} frame, got {actual}")]
    WrongFrame {
        expected: &'static str,
        actual: String,
    },

    #[error("circuit has no ancilla to post-select on")]
    MissingAncilla,

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("coefficients must be real for circuit execution (site {site})")]
    ComplexCoefficients { site: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
