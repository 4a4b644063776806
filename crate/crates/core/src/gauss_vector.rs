//! Reduction of jointly Gaussian vectors to a product source.
//!
//! X and Y are whitened, and the whitened cross-covariance is diagonalised by
//! its singular vectors; the singular values are the canonical correlations
//! and become the per-component `rho_xy`. With an eavesdropper the same basis
//! of X must also diagonalise the X-Z operator, which is possible exactly when
//! the two operators
//!
//! ```text
//! A = Sx^-1/2 Sxz Sz^-1 Szx Sx^-1/2,   B = Sx^-1/2 Sxy Sy^-1 Syx Sx^-1/2
//! ```
//!
//! commute. Non-commuting inputs are refused.

use nalgebra::{DMatrix, DVector, RealField, SymmetricEigen};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sk::GaussTriple;
use crate::validation::Violation;
use crate::waterfill::{key_rate, BetaProfile, RatePoint};

/// Scalars usable for the dense linear algebra in this module.
pub trait LinalgReal: Real + RealField {}
impl<T: Real + RealField> LinalgReal for T {}

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;
/// Relative tolerance on the commutator norm.
pub const DEFAULT_COMMUTE_TOL: f64 = 1e-8;
const SYMMETRY_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
/// Eigenvalues of B closer than this (relative) are treated as one eigenspace.
const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
struct Eavesdropper<T: LinalgReal> {
    sigma_z: DMatrix<T>,
    sigma_xz: DMatrix<T>,
}

/// Covariances of a jointly Gaussian triple. The Z blocks are optional;
/// without them there is no eavesdropper.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSet<T: LinalgReal> {
    sigma_x: DMatrix<T>,
    sigma_y: DMatrix<T>,
    sigma_xy: DMatrix<T>,
    eavesdropper: Option<Eavesdropper<T>>,
}

fn max_abs<T: LinalgReal>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &v| Float::max(acc, Float::abs(v)))
}

fn symmetrize<T: LinalgReal>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::half()
}

fn check_symmetric_psd<T: LinalgReal>(name: &str, m: &DMatrix<T>, out: &mut Vec<Violation>) {
    if !m.is_square() {
        out.push(Violation::new(name, format!("not square ({}x{})", m.nrows(), m.ncols())));
        return;
    }
    if m.iter().any(|v| !Float::is_finite(*v)) {
        out.push(Violation::new(name, "non-finite entry"));
        return;
    }
    let scale = Float::max(T::one(), max_abs(m));
    let asym = max_abs(&(m - m.transpose()));
    if asym > T::lit(SYMMETRY_TOL) * scale {
        out.push(Violation::new(name, format!("not symmetric (max asymmetry {:e})", asym.as_f64())));
    }
    let eig = SymmetricEigen::new(symmetrize(m)).eigenvalues;
    let (lo, hi) = eig.iter().fold((T::infinity(), T::zero()), |(lo, hi), &l| (Float::min(lo, l), Float::max(hi, l)));
    if lo < -T::lit(PSD_TOL) * Float::max(T::one(), hi) {
        out.push(Violation::new(
            name,
            format!("not positive semidefinite (min eigenvalue {:e})", lo.as_f64()),
        ));
    }
}

fn joint<T: LinalgReal>(a: &DMatrix<T>, ab: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(na + nb, na + nb);
    m.view_mut((0, 0), (na, na)).copy_from(a);
    m.view_mut((0, na), (na, nb)).copy_from(ab);
    m.view_mut((na, 0), (nb, na)).copy_from(&ab.transpose());
    m.view_mut((na, na), (nb, nb)).copy_from(b);
    m
}

impl<T: LinalgReal> CovarianceSet<T> {
    /// Validate and build. `eavesdropper` is `(sigma_z, sigma_xz)`.
    pub fn new(
        sigma_x: DMatrix<T>,
        sigma_y: DMatrix<T>,
        sigma_xy: DMatrix<T>,
        eavesdropper: Option<(DMatrix<T>, DMatrix<T>)>,
    ) -> Result<Self> {
        let (sigma_z, sigma_xz) = match eavesdropper {
            Some((z, xz)) => (Some(z), Some(xz)),
            None => (None, None),
        };
        if let Some(v) = Self::audit(&sigma_x, &sigma_y, &sigma_xy, sigma_z.as_ref(), sigma_xz.as_ref()).first() {
            return Err(violation_to_error(v));
        }
        Ok(Self {
            sigma_x,
            sigma_y,
            sigma_xy,
            eavesdropper: sigma_z.zip(sigma_xz).map(|(sigma_z, sigma_xz)| Eavesdropper { sigma_z, sigma_xz }),
        })
    }

    /// Every invariant violation of the raw blocks.
    pub fn audit(
        sigma_x: &DMatrix<T>,
        sigma_y: &DMatrix<T>,
        sigma_xy: &DMatrix<T>,
        sigma_z: Option<&DMatrix<T>>,
        sigma_xz: Option<&DMatrix<T>>,
    ) -> Vec<Violation> {
        let mut out = Vec::new();
        check_symmetric_psd("sigma_x", sigma_x, &mut out);
        check_symmetric_psd("sigma_y", sigma_y, &mut out);
        let nx = sigma_x.nrows();
        let mut dims_ok = out.is_empty();
        if sigma_xy.shape() != (nx, sigma_y.nrows()) {
            out.push(Violation::new(
                "sigma_xy",
                format!("shape {:?}, expected ({}, {})", sigma_xy.shape(), nx, sigma_y.nrows()),
            ));
            dims_ok = false;
        }
        if dims_ok {
            check_symmetric_psd("joint(x,y)", &joint(sigma_x, sigma_xy, sigma_y), &mut out);
        }
        match (sigma_z, sigma_xz) {
            (None, None) => {}
            (Some(z), Some(xz)) => {
                let before = out.len();
                check_symmetric_psd("sigma_z", z, &mut out);
                if xz.shape() != (nx, z.nrows()) {
                    out.push(Violation::new(
                        "sigma_xz",
                        format!("shape {:?}, expected ({}, {})", xz.shape(), nx, z.nrows()),
                    ));
                }
                if out.len() == before && sigma_x.is_square() {
                    check_symmetric_psd("joint(x,z)", &joint(sigma_x, xz, z), &mut out);
                }
            }
            (Some(_), None) => out.push(Violation::new("sigma_xz", "missing while sigma_z is given")),
            (None, Some(_)) => out.push(Violation::new("sigma_z", "missing while sigma_xz is given")),
        }
        out
    }

    pub fn sigma_x(&self) -> &DMatrix<T> {
        &self.sigma_x
    }

    pub fn sigma_y(&self) -> &DMatrix<T> {
        &self.sigma_y
    }

    pub fn sigma_xy(&self) -> &DMatrix<T> {
        &self.sigma_xy
    }

    pub fn sigma_z(&self) -> Option<&DMatrix<T>> {
        self.eavesdropper.as_ref().map(|e| &e.sigma_z)
    }

    pub fn sigma_xz(&self) -> Option<&DMatrix<T>> {
        self.eavesdropper.as_ref().map(|e| &e.sigma_xz)
    }

    pub fn has_eavesdropper(&self) -> bool {
        self.eavesdropper.is_some()
    }

    /// Same source seen through invertible maps `X -> mx X`, `Y -> ny Y`.
    pub fn transformed(&self, mx: &DMatrix<T>, ny: &DMatrix<T>) -> Result<Self> {
        Self::new(
            mx * &self.sigma_x * mx.transpose(),
            ny * &self.sigma_y * ny.transpose(),
            mx * &self.sigma_xy * ny.transpose(),
            self.eavesdropper.as_ref().map(|e| (e.sigma_z.clone(), mx * &e.sigma_xz)),
        )
    }
}

fn violation_to_error(v: &Violation) -> Error {
    let name = v.location.clone();
    if v.message.starts_with("not symmetric") {
        Error::NotSymmetric { name, asymmetry: trailing_number(&v.message) }
    } else if v.message.starts_with("not positive semidefinite") {
        Error::NotPsd { name, min_eigenvalue: trailing_number(&v.message) }
    } else {
        Error::DimensionMismatch(v.to_string())
    }
}

fn trailing_number(msg: &str) -> f64 {
    msg.trim_end_matches(')')
        .rsplit(' ')
        .next()
        .and_then(|s| s.parse().ok())
        .unwrap_or(f64::NAN)
}

struct Whitening<T: LinalgReal> {
    /// Orthonormal eigenvectors of the retained subspace, as columns.
    basis: DMatrix<T>,
    /// `lambda^-1/2` for each retained eigenvalue.
    inv_sqrt_eig: DVector<T>,
}

impl<T: LinalgReal> Whitening<T> {
    fn new(sigma: &DMatrix<T>, rank_tol: T) -> Self {
        let eig = SymmetricEigen::new(symmetrize(sigma));
        let top = eig.eigenvalues.iter().fold(T::zero(), |m, &l| Float::max(m, l));
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&i| top > T::zero() && eig.eigenvalues[i] > rank_tol * top)
            .collect();
        let basis = eig.eigenvectors.select_columns(keep.iter());
        let inv_sqrt_eig = DVector::from_iterator(keep.len(), keep.iter().map(|&i| Float::recip(Float::sqrt(eig.eigenvalues[i]))));
        Self { basis, inv_sqrt_eig }
    }

    /// `r x n` map sending the retained subspace to `I_r` covariance.
    fn whitener(&self) -> DMatrix<T> {
        DMatrix::from_diagonal(&self.inv_sqrt_eig) * self.basis.transpose()
    }

    /// Symmetric `n x n` pseudo inverse square root.
    fn inv_sqrt(&self) -> DMatrix<T> {
        &self.basis * self.whitener()
    }
}

fn validated<T: LinalgReal>(name: &str, sigma: &DMatrix<T>) -> Result<()> {
    let mut v = Vec::new();
    check_symmetric_psd(name, sigma, &mut v);
    v.first().map_or(Ok(()), |v| Err(violation_to_error(v)))
}

/// Symmetric `Sigma^-1/2` from the eigendecomposition, inverting only
/// eigenvalues above `rank_tol * lambda_max`.
///
/// On the retained subspace `S Sigma S = I`; the rest is mapped to zero.
pub fn inv_sqrt<T: LinalgReal>(sigma: &DMatrix<T>, rank_tol: T) -> Result<DMatrix<T>> {
    validated("sigma", sigma)?;
    Ok(Whitening::new(sigma, rank_tol).inv_sqrt())
}

/// Outcome of [`commutativity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commutativity<T> {
    pub commutes: bool,
    /// Frobenius norm of `AB - BA`.
    pub norm: T,
}

fn operators<T: LinalgReal>(cov: &CovarianceSet<T>, rank_tol: T) -> Option<(DMatrix<T>, DMatrix<T>)> {
    let e = cov.eavesdropper.as_ref()?;
    let sx = Whitening::new(&cov.sigma_x, rank_tol).inv_sqrt();
    let sy = Whitening::new(&cov.sigma_y, rank_tol).inv_sqrt();
    let sz = Whitening::new(&e.sigma_z, rank_tol).inv_sqrt();
    let left_b = &sx * &cov.sigma_xy * &sy;
    let left_a = &sx * &e.sigma_xz * &sz;
    Some((&left_a * left_a.transpose(), &left_b * left_b.transpose()))
}

/// Whether the X-Z and X-Y correlation operators commute, i.e. whether one
/// basis of X diagonalises both.
///
/// Passes when `||AB - BA||_F <= tol (||A||_F ||B||_F + 1)`.
pub fn commutativity_check<T: LinalgReal>(cov: &CovarianceSet<T>, tol: T) -> Result<Commutativity<T>> {
    let (a, b) = operators(cov, T::lit(DEFAULT_RANK_TOL)).ok_or(Error::MissingEavesdropper)?;
    let norm = (&a * &b - &b * &a).norm();
    let bound = tol * (a.norm() * b.norm() + T::one());
    Ok(Commutativity { commutes: norm <= bound, norm })
}

/// Product-source coordinates of a Gaussian triple.
///
/// `transform_x` maps the original X to product coordinates X̄ = `transform_x` X,
/// and likewise for Y and Z. For full-rank covariances the transforms are square
/// and invertible; with a rank-deficient block the null directions are dropped
/// and the transform has one row per retained dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductReduction<T: LinalgReal> {
    /// One entry per X̄ component, with nonnegative correlations.
    pub pairs: Vec<GaussTriple<T>>,
    pub transform_x: DMatrix<T>,
    pub transform_y: DMatrix<T>,
    pub transform_z: Option<DMatrix<T>>,
    /// Commutator norm measured before reducing (0 without an eavesdropper).
    pub commutator_norm: T,
}

fn offdiag_ratio<T: LinalgReal>(m: &DMatrix<T>) -> T {
    let total = m.norm();
    if total == T::zero() {
        return T::zero();
    }
    let mut off = T::zero();
    for ((i, j), &v) in m.iter().enumerate().map(|(k, v)| ((k % m.nrows(), k / m.nrows()), v)) {
        if i != j {
            off += v * v;
        }
    }
    Float::sqrt(off) / total
}

impl<T: LinalgReal> ProductReduction<T> {
    /// Off-diagonal Frobenius mass relative to the total, for the transformed
    /// `Sigma_X, Sigma_Y, Sigma_XY` and (if present) `Sigma_Z, Sigma_XZ`.
    pub fn residuals(&self, cov: &CovarianceSet<T>) -> Vec<T> {
        let (tx, ty) = (&self.transform_x, &self.transform_y);
        let mut out = vec![
            offdiag_ratio(&(tx * &cov.sigma_x * tx.transpose())),
            offdiag_ratio(&(ty * &cov.sigma_y * ty.transpose())),
            offdiag_ratio(&(tx * &cov.sigma_xy * ty.transpose())),
        ];
        if let (Some(e), Some(tz)) = (&cov.eavesdropper, &self.transform_z) {
            out.push(offdiag_ratio(&(tz * &e.sigma_z * tz.transpose())));
            out.push(offdiag_ratio(&(tx * &e.sigma_xz * tz.transpose())));
        }
        out
    }

    pub fn max_residual(&self, cov: &CovarianceSet<T>) -> T {
        self.residuals(cov).into_iter().fold(T::zero(), |m, r| Float::max(m, r))
    }
}

/// Orthonormal basis of the partner side: the normalised `cross^T u_i` for every
/// column `u_i` of `u` with non-negligible gain, completed to the full space.
fn partner_basis<T: LinalgReal>(u: &DMatrix<T>, cross: &DMatrix<T>) -> DMatrix<T> {
    let dim = cross.ncols();
    let mut cols: Vec<DVector<T>> = Vec::with_capacity(dim);
    let candidates = (0..u.ncols())
        .map(|i| cross.tr_mul(&u.column(i)))
        .filter(|v| v.norm() > T::lit(1e-10))
        .chain((0..dim).map(|k| DVector::from_fn(dim, |i, _| if i == k { T::one() } else { T::zero() })));
    for mut v in candidates {
        if cols.len() == dim {
            break;
        }
        // Modified Gram-Schmidt, twice for stability.
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dot(&v);
                v -= c * proj;
            }
        }
        let n = v.norm();
        if n > T::lit(1e-8) {
            cols.push(v / n);
        }
    }
    DMatrix::from_columns(&cols)
}

/// Orthonormal eigenbasis of `b` (descending eigenvalues) that also
/// diagonalises `a` when `a` commutes with `b`.
fn joint_eigenbasis<T: LinalgReal>(b: &DMatrix<T>, a: Option<&DMatrix<T>>) -> (DVector<T>, DMatrix<T>) {
    let n = b.nrows();
    let eig = SymmetricEigen::new(symmetrize(b));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).expect("finite eigenvalues"));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut basis = eig.eigenvectors.select_columns(order.iter());
    let Some(a) = a else { return (values, basis) };

    let scale = Float::max(T::one(), values.iter().fold(T::zero(), |m, &v| Float::max(m, Float::abs(v))));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] <= T::lit(CLUSTER_TOL) * scale {
            end += 1;
        }
        if end - start > 1 {
            let block = basis.columns(start, end - start).into_owned();
            let restricted = block.transpose() * a * &block;
            let inner = SymmetricEigen::new(symmetrize(&restricted));
            let k = end - start;
            let mut inner_order: Vec<usize> = (0..k).collect();
            inner_order.sort_by(|&i, &j| inner.eigenvalues[j].partial_cmp(&inner.eigenvalues[i]).expect("finite"));
            let rotated = &block * inner.eigenvectors.select_columns(inner_order.iter());
            basis.columns_mut(start, k).copy_from(&rotated);
        }
        start = end;
    }
    (values, basis)
}

fn clamp_unit<T: LinalgReal>(x: T) -> T {
    Float::min(Float::max(x, T::zero()), T::one())
}

/// Reduce `cov` to per-component correlation pairs with default rank tolerance.
///
/// `tol` is the relative commutativity tolerance; exceeding it is an error.
pub fn reduce_to_product<T: LinalgReal>(cov: &CovarianceSet<T>, tol: T) -> Result<ProductReduction<T>> {
    reduce_to_product_with(cov, tol, T::lit(DEFAULT_RANK_TOL))
}

pub fn reduce_to_product_with<T: LinalgReal>(
    cov: &CovarianceSet<T>,
    tol: T,
    rank_tol: T,
) -> Result<ProductReduction<T>> {
    let commutator_norm = if cov.has_eavesdropper() {
        let c = commutativity_check(cov, tol)?;
        if !c.commutes {
            return Err(Error::NotCommuting { norm: c.norm.as_f64() });
        }
        c.norm
    } else {
        T::zero()
    };

    let wx = Whitening::new(&cov.sigma_x, rank_tol).whitener();
    let wy = Whitening::new(&cov.sigma_y, rank_tol).whitener();
    if wx.nrows() == 0 {
        return Err(Error::InvalidArgument("sigma_x has rank zero".into()));
    }
    let cross_y = &wx * &cov.sigma_xy * wy.transpose();
    let b = &cross_y * cross_y.transpose();

    let eaves = cov.eavesdropper.as_ref().map(|e| {
        let wz = Whitening::new(&e.sigma_z, rank_tol).whitener();
        let cross_z = &wx * &e.sigma_xz * wz.transpose();
        let a = &cross_z * cross_z.transpose();
        (wz, cross_z, a)
    });

    let (values, u) = joint_eigenbasis(&b, eaves.as_ref().map(|(_, _, a)| a));
    let transform_x = u.transpose() * &wx;
    let transform_y = partner_basis(&u, &cross_y).transpose() * &wy;

    let (rho_xz_sq, transform_z) = match &eaves {
        Some((wz, cross_z, a)) => {
            let diag = (u.transpose() * a * &u).diagonal();
            (diag, Some(partner_basis(&u, cross_z).transpose() * wz))
        }
        None => (DVector::zeros(values.len()), None),
    };

    let pairs = values
        .iter()
        .zip(rho_xz_sq.iter())
        .map(|(&xy, &xz)| GaussTriple::new(Float::sqrt(clamp_unit(xy)), Float::sqrt(clamp_unit(xz))))
        .collect::<Result<Vec<_>>>()?;

    Ok(ProductReduction { pairs, transform_x, transform_y, transform_z, commutator_norm })
}

/// Beta profile of the product source equivalent to `cov`.
pub fn vector_profile<T: LinalgReal>(cov: &CovarianceSet<T>, tol: T) -> Result<(BetaProfile<T>, ProductReduction<T>)> {
    let reduction = reduce_to_product(cov, tol)?;
    let profile = BetaProfile::from_triples(&reduction.pairs)?;
    Ok((profile, reduction))
}

/// Key rate of a vector Gaussian source at `r_budget` bits, through the
/// product reduction and water-filling.
pub fn vector_key_rate<T: LinalgReal>(
    cov: &CovarianceSet<T>,
    r_budget: T,
    tol: T,
) -> Result<(T, RatePoint<T>, ProductReduction<T>)> {
    let (profile, reduction) = vector_profile(cov, tol)?;
    let (key, point) = key_rate(&profile, r_budget)?;
    Ok((key, point, reduction))
}
