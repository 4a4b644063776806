//! Library behind the `keycap` command: input parsing, dispatch to the
//! solvers and result rendering.

pub mod error;
pub mod input;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use keycap::gauss_vector::{vector_profile, DEFAULT_COMMUTE_TOL};
use keycap::sdpi::{
    default_grid_resolution, initial_efficiency_discrete, maximal_correlation, s_star, s_star_degraded,
    s_star_lower_bound, DEFAULT_RESTARTS,
};
use keycap::spectral::process_curve;
use keycap::validation::Violation;
use keycap::waterfill::frontier_curve;
use keycap::BetaProfile64;

pub use error::CliError;
use input::Source;
use output::DiscreteRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Scalar,
    Product,
    Vector,
    Spectral,
    Discrete,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum RateUnit {
    #[default]
    Bits,
    Nats,
}

pub const DEFAULT_POINTS: usize = 64;

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub mode: Mode,
    pub input: PathBuf,
    /// `None` or `-` writes to standard output.
    pub output: Option<PathBuf>,
    pub points: usize,
    pub unit: RateUnit,
    pub seed: u64,
    pub tol_commute: Option<f64>,
    pub grid_resolution: Option<usize>,
}

impl JobSpec {
    pub fn new(mode: Mode, input: impl Into<PathBuf>) -> Self {
        Self {
            mode,
            input: input.into(),
            output: None,
            points: DEFAULT_POINTS,
            unit: RateUnit::Bits,
            seed: 0,
            tol_commute: None,
            grid_resolution: None,
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if self.points < 2 {
            return Err(CliError::Usage(format!("--points must be at least 2, got {}", self.points)));
        }
        if let Some(t) = self.tol_commute {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!("--tol-commute must be positive, got {t}")));
            }
        }
        if self.grid_resolution == Some(0) {
            return Err(CliError::Usage("--grid-resolution must be positive".into()));
        }
        Ok(())
    }
}

/// Compute the job's output text without writing it.
pub fn render(job: &JobSpec) -> Result<String, CliError> {
    job.check()?;
    let source = input::load(job.mode, &job.input)?;
    let curve = |profile: BetaProfile64| -> Result<String, CliError> {
        Ok(output::curve_csv(&frontier_curve(&profile, job.points)?, job.unit))
    };
    match &source {
        Source::Scalar(p) => {
            let triple = keycap::GaussTriple64::new(p.rho_xy, p.rho_xz.unwrap_or(0.0))?;
            curve(BetaProfile64::from_triples(&[triple])?)
        }
        Source::Product(p) => curve(p.profile()?),
        Source::Vector(v) => {
            let cov = v.covariance()?;
            let (profile, _) = vector_profile(&cov, job.tol_commute.unwrap_or(DEFAULT_COMMUTE_TOL))?;
            curve(profile)
        }
        Source::Spectral(t) => Ok(output::process_csv(&process_curve(&t.grid()?, job.points)?, job.unit)),
        Source::Discrete(d) => {
            let pmf = d.pmf()?;
            let resolution = job.grid_resolution.unwrap_or_else(|| default_grid_resolution(pmf.nx()));
            let rho2_m = maximal_correlation(&pmf)?;
            let (constant, lower_bound) = if pmf.has_z() {
                let c = s_star_degraded(&pmf, resolution)?;
                let lb = s_star_lower_bound(&pmf, pmf.nx().max(2), DEFAULT_RESTARTS, job.seed)?;
                (c, Some(lb))
            } else {
                (s_star(&pmf, resolution)?, None)
            };
            let efficiency = initial_efficiency_discrete(&constant).ok();
            Ok(output::discrete_json(&DiscreteRecord {
                constant: &constant,
                rho2_m,
                efficiency,
                lower_bound: lower_bound.as_ref(),
            }))
        }
    }
}

/// Compute and write. A file destination is written atomically, and
/// nothing is written when the computation fails.
pub fn run(job: &JobSpec) -> Result<(), CliError> {
    let text = render(job)?;
    match job.output.as_deref() {
        None => print_stdout(&text),
        Some(p) if p == Path::new("-") => print_stdout(&text),
        Some(p) => write_atomic(p, &text),
    }
}

fn print_stdout(text: &str) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
}

fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Parse the input and list every invariant violation without computing.
pub fn validate(job: &JobSpec) -> Result<Vec<Violation>, CliError> {
    Ok(input::load(job.mode, &job.input)?.audit())
}
