use std::path::PathBuf;

use keycap::validation::Violation;
use keycap::Error;

/// Invalid option values.
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_IO: i32 = 4;
/// `validate` found at least one violation.
pub const EXIT_VIOLATIONS: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid option: {0}")]
    Usage(String),
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", list(.0))]
    Violations(Vec<Violation>),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn parse(path: &std::path::Path, message: impl Into<String>) -> Self {
        CliError::Parse { path: path.to_path_buf(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Violations(_) => EXIT_VIOLATIONS,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

/// One code per solver error, starting at 10.
pub fn core_exit_code(e: &Error) -> i32 {
    match e {
        Error::DegenerateCorrelation => 10,
        Error::CorrelationOutOfRange(_) => 11,
        Error::NegativeRate(_) => 12,
        Error::InvalidVariance { .. } => 13,
        Error::InvalidMu(_) => 14,
        Error::EmptyProfile => 15,
        Error::InvalidWeight(_) => 16,
        Error::ToleranceNotMet(_) => 17,
        Error::NonConcaveInput { .. } => 18,
        Error::NotSymmetric { .. } => 19,
        Error::NotPsd { .. } => 20,
        Error::DimensionMismatch(_) => 21,
        Error::MissingEavesdropper => 22,
        Error::NotCommuting { .. } => 23,
        Error::NotSummable { .. } => 24,
        Error::InvalidGrid(_) => 25,
        Error::DegenerateSpectrum { .. } => 26,
        Error::AlphabetTooLarge { .. } => 27,
        Error::DegenerateMarginal(_) => 28,
        Error::InvalidPmf(_) => 29,
        Error::DenominatorVanishes => 30,
        Error::SaturatedConstant => 31,
        Error::InvalidArgument(_) => 32,
    }
}

fn list(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
