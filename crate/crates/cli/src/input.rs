//! Input schemas for each mode.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use keycap::sdpi::{JointPmf, DEFAULT_ALPHABET_CAP};
use keycap::validation::Violation;
use keycap::{BetaProfile64, CovarianceSet64, GaussTriple64, JointPmf64, SpectrumGrid64};

use crate::error::CliError;
use crate::Mode;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInput {
    pub rho_xy: f64,
    #[serde(default)]
    pub rho_xz: Option<f64>,
}

impl PairInput {
    fn triple(&self) -> keycap::Result<GaussTriple64> {
        GaussTriple64::new(self.rho_xy, self.rho_xz.unwrap_or(0.0))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductInput {
    #[serde(default)]
    pub pairs: Option<Vec<PairInput>>,
    #[serde(default)]
    pub betas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorInput {
    pub sigma_x: Vec<Vec<f64>>,
    pub sigma_y: Vec<Vec<f64>>,
    pub sigma_xy: Vec<Vec<f64>>,
    #[serde(default)]
    pub sigma_z: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub sigma_xz: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteInput {
    #[serde(default)]
    pub pmf_xy: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub pmf_xyz: Option<Vec<Vec<Vec<f64>>>>,
}

/// Columns of a spectral CSV file.
#[derive(Debug, Clone, Default)]
pub struct SpectralTable {
    pub omega: Vec<f64>,
    pub s_x: Vec<f64>,
    pub s_y: Vec<f64>,
    pub s_xy: Vec<Complex64>,
    pub eavesdropper: Option<(Vec<f64>, Vec<Complex64>)>,
}

#[derive(Debug, Clone)]
pub enum Source {
    Scalar(PairInput),
    Product(ProductInput),
    Vector(VectorInput),
    Spectral(SpectralTable),
    Discrete(DiscreteInput),
}

pub fn load(mode: Mode, path: &Path) -> Result<Source, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Ok(match mode {
        Mode::Scalar => Source::Scalar(json(path, &text)?),
        Mode::Product => {
            let p: ProductInput = json(path, &text)?;
            if p.pairs.is_some() == p.betas.is_some() {
                return Err(CliError::parse(path, "expected exactly one of `pairs` or `betas`"));
            }
            Source::Product(p)
        }
        Mode::Vector => Source::Vector(json(path, &text)?),
        Mode::Spectral => Source::Spectral(spectral_csv(path, &text)?),
        Mode::Discrete => {
            let d: DiscreteInput = json(path, &text)?;
            if d.pmf_xy.is_some() == d.pmf_xyz.is_some() {
                return Err(CliError::parse(path, "expected exactly one of `pmf_xy` or `pmf_xyz`"));
            }
            Source::Discrete(d)
        }
    })
}

fn json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::parse(path, e.to_string()))
}

const REQUIRED: [&str; 5] = ["omega", "s_x", "s_y", "re_s_xy", "im_s_xy"];
const EAVESDROPPER: [&str; 3] = ["s_z", "re_s_xz", "im_s_xz"];

fn spectral_csv(path: &Path, text: &str) -> Result<SpectralTable, CliError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::parse(path, e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(REQUIRED) {
        *slot = column(name).ok_or_else(|| CliError::parse(path, format!("line 1: missing column `{name}`")))?;
    }
    let z_cols: Vec<Option<usize>> = EAVESDROPPER.iter().map(|n| column(n)).collect();
    let z_idx = match z_cols.iter().filter(|c| c.is_some()).count() {
        0 => None,
        3 => Some([z_cols[0].unwrap_or(0), z_cols[1].unwrap_or(0), z_cols[2].unwrap_or(0)]),
        _ => return Err(CliError::parse(path, "line 1: columns s_z, re_s_xz, im_s_xz must appear together")),
    };
    let mut t = SpectralTable::default();
    let mut z = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| CliError::parse(path, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64, CliError> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>().map_err(|_| {
                CliError::parse(path, format!("line {line}, column `{}`: `{raw}` is not a number", &headers[i]))
            })
        };
        t.omega.push(field(idx[0])?);
        t.s_x.push(field(idx[1])?);
        t.s_y.push(field(idx[2])?);
        t.s_xy.push(Complex64::new(field(idx[3])?, field(idx[4])?));
        if let Some(zi) = z_idx {
            z.0.push(field(zi[0])?);
            z.1.push(Complex64::new(field(zi[1])?, field(zi[2])?));
        }
    }
    t.eavesdropper = z_idx.map(|_| z);
    Ok(t)
}

fn matrix(name: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, Violation> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 {
        return Err(Violation::new(name, "empty matrix"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Violation::new(name, format!("row {i} has {} entries, expected {ncols}", rows[i].len())));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

type Blocks = (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, Option<DMatrix<f64>>, Option<DMatrix<f64>>);

impl VectorInput {
    fn blocks(&self) -> Result<Blocks, Vec<Violation>> {
        let opt = |name, m: &Option<Vec<Vec<f64>>>| m.as_ref().map(|m| matrix(name, m)).transpose();
        let parts = (
            matrix("sigma_x", &self.sigma_x),
            matrix("sigma_y", &self.sigma_y),
            matrix("sigma_xy", &self.sigma_xy),
            opt("sigma_z", &self.sigma_z),
            opt("sigma_xz", &self.sigma_xz),
        );
        match parts {
            (Ok(x), Ok(y), Ok(xy), Ok(z), Ok(xz)) => Ok((x, y, xy, z, xz)),
            (x, y, xy, z, xz) => Err([x.err(), y.err(), xy.err(), z.err(), xz.err()].into_iter().flatten().collect()),
        }
    }

    pub fn covariance(&self) -> Result<CovarianceSet64, CliError> {
        let (x, y, xy, z, xz) = self.blocks().map_err(CliError::Violations)?;
        let eaves = match (z, xz) {
            (Some(z), Some(xz)) => Some((z, xz)),
            (None, None) => None,
            _ => return Err(keycap::Error::MissingEavesdropper.into()),
        };
        Ok(CovarianceSet64::new(x, y, xy, eaves)?)
    }
}

impl ProductInput {
    pub fn profile(&self) -> Result<BetaProfile64, CliError> {
        Ok(match (&self.pairs, &self.betas) {
            (Some(pairs), _) => {
                let triples = pairs.iter().map(PairInput::triple).collect::<keycap::Result<Vec<_>>>()?;
                BetaProfile64::from_triples(&triples)?
            }
            (None, Some(betas)) => BetaProfile64::from_values(betas)?,
            (None, None) => return Err(keycap::Error::EmptyProfile.into()),
        })
    }
}

impl SpectralTable {
    pub fn grid(&self) -> Result<SpectrumGrid64, CliError> {
        Ok(SpectrumGrid64::new(
            self.omega.clone(),
            self.s_x.clone(),
            self.s_y.clone(),
            self.s_xy.clone(),
            self.eavesdropper.clone(),
        )?)
    }
}

impl DiscreteInput {
    pub fn pmf(&self) -> Result<JointPmf64, CliError> {
        Ok(match (&self.pmf_xy, &self.pmf_xyz) {
            (Some(t), _) => JointPmf::from_xy(t.clone())?,
            (None, Some(c)) => JointPmf::from_xyz(c.clone())?,
            (None, None) => return Err(keycap::Error::InvalidPmf("no table given".into()).into()),
        })
    }
}

fn pair_violations(loc: &str, p: &PairInput, out: &mut Vec<Violation>) {
    for (name, v) in [("rho_xy", Some(p.rho_xy)), ("rho_xz", p.rho_xz)] {
        if let Some(v) = v {
            if !(v.is_finite() && v.abs() <= 1.0) {
                out.push(Violation::new(format!("{loc}{name}"), format!("{v} is outside [-1, 1]")));
            }
        }
    }
    if p.rho_xy.abs() == 1.0 {
        out.push(Violation::new(format!("{loc}rho_xy"), "|rho_xy| = 1 gives an unbounded key rate"));
    }
}

impl Source {
    /// Every invariant violation of the parsed input.
    pub fn audit(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        match self {
            Source::Scalar(p) => pair_violations("", p, &mut out),
            Source::Product(p) => {
                if let Some(pairs) = &p.pairs {
                    if pairs.is_empty() {
                        out.push(Violation::new("pairs", "empty list"));
                    }
                    for (i, pair) in pairs.iter().enumerate() {
                        pair_violations(&format!("pairs[{i}]."), pair, &mut out);
                    }
                }
                if let Some(betas) = &p.betas {
                    if betas.is_empty() {
                        out.push(Violation::new("betas", "empty list"));
                    }
                    for (i, b) in betas.iter().enumerate().filter(|(_, b)| !b.is_finite()) {
                        out.push(Violation::new(format!("betas[{i}]"), format!("{b} is not finite")));
                    }
                }
            }
            Source::Vector(v) => match v.blocks() {
                Err(vs) => out.extend(vs),
                Ok((x, y, xy, z, xz)) => out.extend(CovarianceSet64::audit(&x, &y, &xy, z.as_ref(), xz.as_ref())),
            },
            Source::Spectral(t) => out.extend(SpectrumGrid64::audit_parts(
                &t.omega,
                &t.s_x,
                &t.s_y,
                &t.s_xy,
                t.eavesdropper.as_ref().map(|(z, xz)| (z.as_slice(), xz.as_slice())),
            )),
            Source::Discrete(d) => {
                if let Some(t) = &d.pmf_xy {
                    out.extend(JointPmf64::audit_xy(t, DEFAULT_ALPHABET_CAP));
                }
                if let Some(c) = &d.pmf_xyz {
                    out.extend(JointPmf64::audit_xyz(c, DEFAULT_ALPHABET_CAP));
                }
            }
        }
        out
    }
}
