use thiserror::Error;

/// Every failure a solver can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate correlation: |rho_xy| = 1 makes beta unbounded")]
    DegenerateCorrelation,
    #[error("correlation out of range: {0}")]
    CorrelationOutOfRange(f64),
    #[error("negative rate: {0}")]
    NegativeRate(f64),
    #[error("invalid conditional variances: need 0 < sigma_y|xz <= sigma_y|z, got {given_xz} and {given_z}")]
    InvalidVariance { given_xz: f64, given_z: f64 },
    #[error("water level mu must be positive and finite, got {0}")]
    InvalidMu(f64),
    #[error("empty beta profile")]
    EmptyProfile,
    #[error("invalid component weight {0}")]
    InvalidWeight(f64),
    #[error("root finder did not converge: {0}")]
    ToleranceNotMet(String),
    #[error("rate curve {index} failed the concavity check")]
    NonConcaveInput { index: usize },
    #[error("matrix `{name}` is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { name: String, asymmetry: f64 },
    #[error("matrix `{name}` is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { name: String, min_eigenvalue: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eavesdropper blocks sigma_z / sigma_xz are absent")]
    MissingEavesdropper,
    #[error("eavesdropper and receiver correlation operators do not commute (commutator norm {norm:e}); the product reduction does not apply")]
    NotCommuting { norm: f64 },
    #[error("correlation window not decayed: |r[edge]| = {edge:e} exceeds 1e-6 * r[0]")]
    NotSummable { edge: f64 },
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("degenerate spectrum at omega = {omega}: |S_xy|^2 reaches S_x S_y")]
    DegenerateSpectrum { omega: f64 },
    #[error("alphabet of size {size} exceeds the cap {cap}")]
    AlphabetTooLarge { size: usize, cap: usize },
    #[error("degenerate marginal: {0}")]
    DegenerateMarginal(String),
    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),
    #[error("divergence-ratio denominator vanishes for every searched input distribution")]
    DenominatorVanishes,
    #[error("s* = 1: initial efficiency is unbounded")]
    SaturatedConstant,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
