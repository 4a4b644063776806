//! Strong data processing constants of finite-alphabet sources.
//!
//! All divergences are in bits. Searches run over input distributions
//! supported on the support of P_X, so every divergence stays finite.

mod degraded;
mod info;
mod lower_bound;
mod pmf;
mod search;

use std::fmt;

use nalgebra::DMatrix;
use num_traits::Float;

pub use lower_bound::DEFAULT_RESTARTS;
pub use pmf::{tensor_product, JointPmf, DEFAULT_ALPHABET_CAP};
pub use search::default_grid_resolution;

use crate::error::{Error, Result};
use crate::gauss_vector::LinalgReal;
use info::channel_of;
use search::RatioProblem;

/// How an [`SdpiResult`] value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpiMethod {
    Grid,
    Refined,
    LowerBoundRandomSearch,
}

impl fmt::Display for SdpiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SdpiMethod::Grid => "grid",
            SdpiMethod::Refined => "refined",
            SdpiMethod::LowerBoundRandomSearch => "lower-bound-random-search",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpiResult<T> {
    /// Best ratio found, clamped to `[0, 1]`.
    pub value: T,
    /// Input distribution attaining `value`, over the full X alphabet. When
    /// the value is a limit at P_X this is a point close to P_X on the
    /// limiting direction.
    pub argmax_qx: Vec<T>,
    pub method: SdpiMethod,
    pub evaluations: usize,
    /// Set when no channel Y → Z reproduces P_{Z|X}; the degraded formula
    /// may then not apply.
    pub degradedness_warning: bool,
}

impl<T: LinalgReal> SdpiResult<T> {
    fn clamped(value: T, argmax_qx: Vec<T>, method: SdpiMethod, evaluations: usize) -> Self {
        let value = Float::min(Float::max(value, T::zero()), T::one());
        Self { value, argmax_qx, method, evaluations, degradedness_warning: false }
    }
}

/// Indices sorted by a key that does not depend on how the other axes are
/// labelled, so relabelled inputs are searched along the same path.
fn canonical_order<T: LinalgReal>(keys: &[Vec<T>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| {
        keys[a].iter().zip(&keys[b]).map(|(u, v)| u.partial_cmp(v).unwrap_or(std::cmp::Ordering::Equal)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    idx
}

fn sorted<T: LinalgReal>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Column order: mass first, then the sorted column.
fn column_order<T: LinalgReal>(table: &[Vec<T>], mass: &[T]) -> Vec<usize> {
    let keys: Vec<Vec<T>> = (0..mass.len())
        .map(|c| std::iter::once(mass[c]).chain(sorted(table.iter().map(|r| r[c]).collect())).collect())
        .collect();
    canonical_order(&keys)
}

fn problem<T: LinalgReal>(pmf: &JointPmf<T>, with_z: bool) -> Result<(RatioProblem<T>, Vec<usize>)> {
    let px_full = pmf.marginal_x();
    let (xy, py_full) = (pmf.xy_table(), pmf.marginal_y());
    let (xz, pz_full) = (pmf.xz_table(), pmf.marginal_z());
    let use_z = with_z && pmf.nz() > 1;
    let ys = column_order(&xy, &py_full);
    let zs = if use_z { column_order(&xz, &pz_full) } else { Vec::new() };
    let row = |x: usize| -> (Vec<T>, Vec<T>) {
        (ys.iter().map(|&y| xy[x][y]).collect(), zs.iter().map(|&z| xz[x][z]).collect())
    };
    let present: Vec<usize> = (0..pmf.nx()).filter(|&x| px_full[x] > T::zero()).collect();
    if present.is_empty() {
        return Err(Error::DegenerateMarginal("P_X has no mass".into()));
    }
    let keys: Vec<Vec<T>> = present
        .iter()
        .map(|&x| {
            let (ry, rz) = row(x);
            let mut key = vec![px_full[x]];
            key.extend(sorted(ry.clone()));
            key.extend(sorted(rz.clone()));
            key.extend(ry);
            key.extend(rz);
            key
        })
        .collect();
    let support: Vec<usize> = canonical_order(&keys).into_iter().map(|i| present[i]).collect();
    let px = support.iter().map(|&x| px_full[x]).collect();
    let wy = channel_of(&support.iter().map(|&x| row(x).0).collect::<Vec<_>>());
    let py = ys.iter().map(|&y| py_full[y]).collect();
    let wz = use_z.then(|| {
        (channel_of(&support.iter().map(|&x| row(x).1).collect::<Vec<_>>()), zs.iter().map(|&z| pz_full[z]).collect())
    });
    Ok((RatioProblem { px, wy, py, wz }, support))
}

fn expand<T: LinalgReal>(q: &[T], support: &[usize], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for (&x, &v) in support.iter().zip(q) {
        out[x] = v;
    }
    out
}

/// sup over Q_X ≠ P_X of D(Q_Y‖P_Y)/D(Q_X‖P_X). A pmf with Z is reduced to
/// its (X, Y) marginal.
pub fn s_star<T: LinalgReal>(pmf: &JointPmf<T>, grid_resolution: usize) -> Result<SdpiResult<T>> {
    let (prob, support) = problem(pmf, false)?;
    if support.len() < 2 {
        return Ok(SdpiResult::clamped(T::zero(), pmf.marginal_x(), SdpiMethod::Grid, 0));
    }
    let (best, evals) = prob.search(grid_resolution)?;
    Ok(match best {
        Some(f) => {
            let method = if f.from_grid { SdpiMethod::Grid } else { SdpiMethod::Refined };
            SdpiResult::clamped(f.value, expand(&f.qx, &support, pmf.nx()), method, evals)
        }
        None => SdpiResult::clamped(T::zero(), pmf.marginal_x(), SdpiMethod::Grid, evals),
    })
}

/// sup over Q_X of (D(Q_Y‖P_Y) − D(Q_Z‖P_Z))/(D(Q_X‖P_X) − D(Q_Z‖P_Z)),
/// the eavesdropper constant when Z is a degraded version of Y. A pmf
/// without Z is treated as having a constant Z.
pub fn s_star_degraded<T: LinalgReal>(pmf: &JointPmf<T>, grid_resolution: usize) -> Result<SdpiResult<T>> {
    let (prob, support) = problem(pmf, true)?;
    if support.len() < 2 {
        return Err(Error::DenominatorVanishes);
    }
    let (best, evals) = prob.search(grid_resolution)?;
    let f = best.ok_or(Error::DenominatorVanishes)?;
    let method = if f.from_grid { SdpiMethod::Grid } else { SdpiMethod::Refined };
    let mut out = SdpiResult::clamped(f.value, expand(&f.qx, &support, pmf.nx()), method, evals);
    if let Some((wz, _)) = &prob.wz {
        out.degradedness_warning = degraded::channel_fit_residual(&prob.wy, wz) > T::lit(degraded::DEGRADED_TOL);
    }
    Ok(out)
}

/// Lower bound on the eavesdropper constant by seeded multi-start ascent
/// over Q_VX with `|V| = v_cardinality`. `restarts = 0` gives the trivial
/// bound 0.
pub fn s_star_lower_bound<T: LinalgReal>(
    pmf: &JointPmf<T>,
    v_cardinality: usize,
    restarts: usize,
    seed: u64,
) -> Result<SdpiResult<T>> {
    if v_cardinality < 2 {
        return Err(Error::InvalidArgument(format!("|V| must be at least 2, got {v_cardinality}")));
    }
    let (prob, support) = problem(pmf, true)?;
    let mut ascent = lower_bound::Ascent { problem: &prob, v_card: v_cardinality, evaluations: 0 };
    let found = if support.len() < 2 { None } else { ascent.run(restarts, seed) };
    let (value, qx) = match found {
        Some((v, q)) => (v, expand(&q, &support, pmf.nx())),
        None => (T::zero(), pmf.marginal_x()),
    };
    Ok(SdpiResult::clamped(value, qx, SdpiMethod::LowerBoundRandomSearch, ascent.evaluations))
}

/// Squared maximal correlation: the second singular value, squared, of
/// P(x, y)/√(P(x)P(y)) over the supports of the marginals.
pub fn maximal_correlation<T: LinalgReal>(pmf: &JointPmf<T>) -> Result<T> {
    let (px, py) = (pmf.marginal_x(), pmf.marginal_y());
    let xs: Vec<usize> = (0..pmf.nx()).filter(|&x| px[x] > T::zero()).collect();
    let ys: Vec<usize> = (0..pmf.ny()).filter(|&y| py[y] > T::zero()).collect();
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::DegenerateMarginal("a marginal has no mass".into()));
    }
    if xs.len() < 2 || ys.len() < 2 {
        return Ok(T::zero());
    }
    let table = pmf.xy_table();
    let q = DMatrix::from_fn(xs.len(), ys.len(), |i, j| {
        let (x, y) = (xs[i], ys[j]);
        table[x][y] / Float::sqrt(px[x] * py[y])
    });
    let mut s: Vec<T> = q.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(Float::min(s[1] * s[1], T::one()))
}

/// s/(1 − s): the initial efficiency of key generation.
pub fn initial_efficiency_discrete<T: LinalgReal>(s: &SdpiResult<T>) -> Result<T> {
    if s.value >= T::one() {
        return Err(Error::SaturatedConstant);
    }
    Ok(s.value / (T::one() - s.value))
}

#[cfg(test)]
mod tests;
