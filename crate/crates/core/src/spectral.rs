//! Key capacity of stationary Gaussian processes.
//!
//! In the frequency domain a stationary source behaves like a continuum of
//! independent components indexed by `omega`, with correlations
//! `|S_xy| / sqrt(S_x S_y)` and `|S_xz| / sqrt(S_x S_z)`. Water-filling then
//! becomes an integral over `[-pi, pi]`:
//!
//! ```text
//! r = 1/(4 pi) int_{beta(w) > mu} log2(beta(w)(mu + 1) / ((beta(w) + 1) mu)) dw
//! R = 1/(4 pi) int_{beta(w) > mu} log2((beta(w) + 1) / (mu + 1)) dw
//! ```
//!
//! Integrals use the composite trapezoid rule on the caller's grid. A cell
//! counts as active when `beta` interpolated to its midpoint exceeds `mu`, and
//! the integrand is clamped at zero on inactive end points. No adaptive
//! refinement is done: refine the grid around sharp features instead.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Real};
use crate::validation::Violation;
use crate::waterfill::{invert_rate, level_grid};

const CAUCHY_SCHWARZ_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-9;
const ENDPOINT_TOL: f64 = 1e-9;
const COHERENCE_TOL: f64 = 1e-12;
const DECAY_TOL: f64 = 1e-6;
const IMAG_TOL: f64 = 1e-10;

/// Sampled spectral densities on a strictly increasing grid covering
/// `[-pi, pi]`. Missing Z data means no eavesdropper.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid<T> {
    omegas: Vec<T>,
    s_x: Vec<T>,
    s_y: Vec<T>,
    s_xy: Vec<Complex<T>>,
    eavesdropper: Option<(Vec<T>, Vec<Complex<T>>)>,
}

impl<T: Real> SpectrumGrid<T> {
    /// `eavesdropper` is `(s_z, s_xz)`.
    pub fn new(
        omegas: Vec<T>,
        s_x: Vec<T>,
        s_y: Vec<T>,
        s_xy: Vec<Complex<T>>,
        eavesdropper: Option<(Vec<T>, Vec<Complex<T>>)>,
    ) -> Result<Self> {
        let grid = Self { omegas, s_x, s_y, s_xy, eavesdropper };
        match grid.audit().first() {
            None => Ok(grid),
            Some(v) if v.location == "omega" || v.message.contains("length") => {
                Err(Error::InvalidGrid(v.to_string()))
            }
            Some(v) => Err(Error::InvalidArgument(v.to_string())),
        }
    }

    /// [`Self::audit`] on raw columns, without building the grid.
    pub fn audit_parts(
        omegas: &[T],
        s_x: &[T],
        s_y: &[T],
        s_xy: &[Complex<T>],
        eavesdropper: Option<(&[T], &[Complex<T>])>,
    ) -> Vec<Violation> {
        let eavesdropper = eavesdropper.map(|(z, xz)| (z.to_vec(), xz.to_vec()));
        Self { omegas: omegas.to_vec(), s_x: s_x.to_vec(), s_y: s_y.to_vec(), s_xy: s_xy.to_vec(), eavesdropper }.audit()
    }

    /// Every invariant violation of the sampled densities.
    pub fn audit(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.omegas.len();
        let lengths = [
            ("s_x", self.s_x.len()),
            ("s_y", self.s_y.len()),
            ("s_xy", self.s_xy.len()),
            ("s_z", self.eavesdropper.as_ref().map_or(n, |e| e.0.len())),
            ("s_xz", self.eavesdropper.as_ref().map_or(n, |e| e.1.len())),
        ];
        for (name, len) in lengths {
            if len != n {
                out.push(Violation::new(name, format!("length {len} differs from grid length {n}")));
            }
        }
        if n < 2 {
            out.push(Violation::new("omega", "need at least two grid points"));
        }
        if !out.is_empty() {
            return out;
        }
        let pi = T::PI();
        let end_tol = T::lit(ENDPOINT_TOL);
        if let Some(k) = self.omegas.windows(2).position(|w| !(w[1] > w[0])) {
            out.push(Violation::new("omega", format!("not strictly increasing at row {}", k + 1)));
        }
        if (self.omegas[0] + pi).abs() > end_tol || (self.omegas[n - 1] - pi).abs() > end_tol {
            out.push(Violation::new(
                "omega",
                format!("grid must span [-pi, pi], got [{}, {}]", self.omegas[0], self.omegas[n - 1]),
            ));
        }
        let s_z = self.s_z();
        let s_xz = self.s_xz();
        for i in 0..n {
            for (name, v) in [("s_x", self.s_x[i]), ("s_y", self.s_y[i]), ("s_z", s_z(i))] {
                if !(v.is_finite() && v >= T::zero()) {
                    out.push(Violation::new(name, format!("row {i}: power spectral density {v} is negative or non-finite")));
                }
            }
            for (name, cross, other) in [("s_xy", self.s_xy[i], self.s_y[i]), ("s_xz", s_xz(i), s_z(i))] {
                let bound = self.s_x[i] * other;
                if cross.norm_sqr() > bound + T::lit(CAUCHY_SCHWARZ_TOL) * bound.max(T::one()) {
                    out.push(Violation::new(
                        name,
                        format!("row {i}: |cross|^2 = {} exceeds product of auto-spectra {bound}", cross.norm_sqr()),
                    ));
                }
            }
        }
        if self.is_symmetric_grid() {
            let tol = T::lit(SYMMETRY_TOL);
            for i in 0..n {
                let j = n - 1 - i;
                let autos = [("s_x", self.s_x[i], self.s_x[j]), ("s_y", self.s_y[i], self.s_y[j]), ("s_z", s_z(i), s_z(j))];
                for (name, a, b) in autos {
                    if (a - b).abs() > tol * a.abs().max(T::one()) {
                        out.push(Violation::new(name, format!("row {i}: S(-w) != S(w) for a real process")));
                    }
                }
                for (name, a, b) in [("s_xy", self.s_xy[i], self.s_xy[j]), ("s_xz", s_xz(i), s_xz(j))] {
                    if (a - b.conj()).norm() > tol * a.norm().max(T::one()) {
                        out.push(Violation::new(name, format!("row {i}: S(-w) != conj(S(w)) for real processes")));
                    }
                }
            }
        }
        out
    }

    fn is_symmetric_grid(&self) -> bool {
        let n = self.omegas.len();
        (0..n).all(|i| (self.omegas[i] + self.omegas[n - 1 - i]).abs() <= T::lit(1e-12))
    }

    fn s_z(&self) -> impl Fn(usize) -> T + '_ {
        move |i| self.eavesdropper.as_ref().map_or(T::one(), |e| e.0[i])
    }

    fn s_xz(&self) -> impl Fn(usize) -> Complex<T> + '_ {
        move |i| self.eavesdropper.as_ref().map_or(Complex::new(T::zero(), T::zero()), |e| e.1[i])
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    pub fn s_x(&self) -> &[T] {
        &self.s_x
    }

    pub fn s_y(&self) -> &[T] {
        &self.s_y
    }

    pub fn s_xy(&self) -> &[Complex<T>] {
        &self.s_xy
    }

    pub fn eavesdropper(&self) -> Option<(&[T], &[Complex<T>])> {
        self.eavesdropper.as_ref().map(|(z, xz)| (z.as_slice(), xz.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

/// Auto- and cross-correlation sequences on the lag window `-w..=w`, stored
/// with lag `-w` first.
///
/// Cross sequences follow `S_xy(omega) = sum_k r_xy[k] e^{-i k omega}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFunctions<T> {
    r_x: Vec<T>,
    r_y: Vec<T>,
    r_xy: Vec<T>,
    eavesdropper: Option<(Vec<T>, Vec<T>)>,
}

impl<T: Real> CorrelationFunctions<T> {
    /// `eavesdropper` is `(r_z, r_xz)`. All sequences must share one odd length.
    pub fn new(r_x: Vec<T>, r_y: Vec<T>, r_xy: Vec<T>, eavesdropper: Option<(Vec<T>, Vec<T>)>) -> Result<Self> {
        let len = r_x.len();
        if len.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("lag window must have odd length, got {len}")));
        }
        let mut autos = vec![("r_x", &r_x), ("r_y", &r_y)];
        let mut all = vec![("r_x", &r_x), ("r_y", &r_y), ("r_xy", &r_xy)];
        if let Some((r_z, r_xz)) = &eavesdropper {
            autos.push(("r_z", r_z));
            all.extend([("r_z", r_z), ("r_xz", r_xz)]);
        }
        if let Some((name, s)) = all.iter().find(|(_, s)| s.len() != len) {
            return Err(Error::DimensionMismatch(format!("{name} has length {}, expected {len}", s.len())));
        }
        let mid = len / 2;
        for (name, r) in autos {
            if !(r[mid] > T::zero()) {
                return Err(Error::InvalidArgument(format!("{name}[0] must be positive")));
            }
            if r.iter().any(|v| !v.is_finite() || v.abs() > r[mid]) {
                return Err(Error::InvalidArgument(format!("{name} exceeds its zero-lag value")));
            }
            let scale = r[mid];
            if (0..len).any(|k| (r[k] - r[len - 1 - k]).abs() > T::lit(IMAG_TOL) * scale) {
                return Err(Error::InvalidArgument(format!("{name} is not symmetric in the lag")));
            }
        }
        Ok(Self { r_x, r_y, r_xy, eavesdropper })
    }

    /// Largest lag `w`.
    pub fn window(&self) -> usize {
        self.r_x.len() / 2
    }
}

fn dtft<T: Real>(r: &[T], omega: T) -> Complex<T> {
    let w = (r.len() / 2) as i64;
    let terms = r.iter().enumerate().map(|(j, &v)| {
        let k = T::from_i64(j as i64 - w).expect("lag fits");
        Complex::from_polar(v, -k * omega)
    });
    terms.fold(Complex::new(T::zero(), T::zero()), |acc, t| acc + t)
}

/// Evaluate `S(omega) = sum_k r[k] e^{-i k omega}` on a uniform grid of
/// `grid_size` points spanning `[-pi, pi]`.
pub fn spectrum_from_correlation<T: Real>(corr: &CorrelationFunctions<T>, grid_size: usize) -> Result<SpectrumGrid<T>> {
    let len = corr.r_x.len();
    if grid_size < 2 * len {
        return Err(Error::InvalidGrid(format!("grid size {grid_size} below twice the window length {len}")));
    }
    let mid = len / 2;
    let decay = T::lit(DECAY_TOL);
    let zero_lag = |r: &[T]| r[mid];
    let mut seqs = vec![(&corr.r_x, zero_lag(&corr.r_x)), (&corr.r_y, zero_lag(&corr.r_y))];
    seqs.push((&corr.r_xy, (zero_lag(&corr.r_x) * zero_lag(&corr.r_y)).sqrt()));
    if let Some((r_z, r_xz)) = &corr.eavesdropper {
        seqs.push((r_z, zero_lag(r_z)));
        seqs.push((r_xz, (zero_lag(&corr.r_x) * zero_lag(r_z)).sqrt()));
    }
    for (r, scale) in seqs {
        let edge = r[0].abs().max(r[len - 1].abs());
        if edge > decay * scale && len > 1 {
            return Err(Error::NotSummable { edge: (edge / scale).as_f64() });
        }
    }

    let step = T::two() * T::PI() / T::of_usize(grid_size - 1);
    let omegas: Vec<T> = (0..grid_size)
        .map(|j| match j {
            0 => -T::PI(),
            j if j + 1 == grid_size => T::PI(),
            j => -T::PI() + step * T::of_usize(j),
        })
        .collect();
    let auto = |r: &[T]| -> Result<Vec<T>> {
        omegas
            .iter()
            .map(|&w| {
                let s = dtft(r, w);
                if s.im.abs() > T::lit(IMAG_TOL) * r[mid] {
                    Err(Error::InvalidArgument(format!("auto-spectrum has imaginary residue {}", s.im)))
                } else {
                    Ok(s.re)
                }
            })
            .collect()
    };
    let cross = |r: &[T]| -> Vec<Complex<T>> { omegas.iter().map(|&w| dtft(r, w)).collect() };
    let s_x = auto(&corr.r_x)?;
    let s_y = auto(&corr.r_y)?;
    let s_xy = cross(&corr.r_xy);
    let eaves = match &corr.eavesdropper {
        Some((r_z, r_xz)) => Some((auto(r_z)?, cross(r_xz))),
        None => None,
    };
    SpectrumGrid::new(omegas, s_x, s_y, s_xy, eaves)
}

/// Per-frequency efficiency
/// `beta(w) = (|S_xy|^2 S_z - |S_xz|^2 S_y) / (S_x S_y S_z - |S_xy|^2 S_z)`.
///
/// Frequencies where any auto-spectrum vanishes carry no key and get
/// `beta = 0`. Perfect X-Y coherence makes `beta` unbounded and is an error.
pub fn beta_omega<T: Real>(grid: &SpectrumGrid<T>) -> Result<Vec<T>> {
    let s_z = grid.s_z();
    let s_xz = grid.s_xz();
    (0..grid.len())
        .map(|i| {
            let (sx, sy, sz) = (grid.s_x[i], grid.s_y[i], s_z(i));
            if sx * sy * sz <= T::zero() {
                return Ok(T::zero());
            }
            let cxy = grid.s_xy[i].norm_sqr();
            let cxz = s_xz(i).norm_sqr();
            let power = sx * sy;
            if cxy >= power * (T::one() - T::lit(COHERENCE_TOL)) {
                return Err(Error::DegenerateSpectrum { omega: grid.omegas[i].as_f64() });
            }
            Ok((cxy * sz - cxz * sy) / ((power - cxy) * sz))
        })
        .collect()
}

fn check_mu<T: Real>(mu: T) -> Result<()> {
    if mu > T::zero() && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidMu(mu.as_f64()))
    }
}

/// Trapezoid integrals of the two water-filling integrands on a grid of
/// precomputed `betas`.
fn integrate<T: Real>(omegas: &[T], betas: &[T], mu: T) -> (T, T) {
    let level = mu.recip().ln_1p();
    let comm = |b: T| if b > mu { level - b.recip().ln_1p() } else { T::zero() };
    let key = |b: T| if b > mu { b.ln_1p() - mu.ln_1p() } else { T::zero() };
    let mut r_terms = Vec::with_capacity(betas.len());
    let mut k_terms = Vec::with_capacity(betas.len());
    for j in 0..omegas.len() - 1 {
        let (b0, b1) = (betas[j], betas[j + 1]);
        if T::half() * (b0 + b1) > mu {
            let h = T::half() * (omegas[j + 1] - omegas[j]);
            r_terms.push(h * (comm(b0) + comm(b1)));
            k_terms.push(h * (key(b0) + key(b1)));
        }
    }
    // (1/4 pi) * (1/2 log2) folded into one factor on natural logs.
    let norm = (T::lit(4.0) * T::PI() * T::LN_2()).recip();
    (norm * ordered_sum(r_terms), norm * ordered_sum(k_terms))
}

/// Communication and key rate (bits per sample) at water level `mu`.
pub fn process_frontier<T: Real>(grid: &SpectrumGrid<T>, mu: T) -> Result<(T, T)> {
    check_mu(mu)?;
    let betas = beta_omega(grid)?;
    Ok(integrate(&grid.omegas, &betas, mu))
}

/// Key rate at `r_budget` bits per sample, and the water level achieving it.
///
/// Returns `(0, max beta+)` for a zero budget and `(0, 1)` when no frequency
/// carries positive `beta`.
pub fn process_key_rate<T: Real>(grid: &SpectrumGrid<T>, r_budget: T) -> Result<(T, T)> {
    if r_budget.is_nan() || r_budget < T::zero() {
        return Err(Error::NegativeRate(r_budget.as_f64()));
    }
    if !r_budget.is_finite() {
        return Err(Error::InvalidArgument("budget must be finite".into()));
    }
    let betas = beta_omega(grid)?;
    let top = betas.iter().fold(T::zero(), |m, &b| m.max(b));
    if top == T::zero() {
        return Ok((T::zero(), T::one()));
    }
    if r_budget == T::zero() {
        return Ok((T::zero(), top));
    }
    let mu = invert_rate(top, r_budget, |mu| integrate(&grid.omegas, &betas, mu).0)?;
    Ok((integrate(&grid.omegas, &betas, mu).1, mu))
}

/// Frontier samples `(mu, r, R)` on a geometric grid of `points` levels from
/// `max beta+` down to `max beta+ * 1e-6`.
pub fn process_curve<T: Real>(grid: &SpectrumGrid<T>, points: usize) -> Result<Vec<(T, T, T)>> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 curve points, got {points}")));
    }
    let betas = beta_omega(grid)?;
    let top = betas.iter().fold(T::zero(), |m, &b| m.max(b));
    Ok(level_grid(top, &[], points)
        .into_iter()
        .map(|mu| {
            let (r, key) = integrate(&grid.omegas, &betas, mu);
            (mu, r, key)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sk::{beta_of, scalar_key_rate, GaussTriple};
    use crate::waterfill::{frontier_at, BetaProfile};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn uniform(n: usize) -> Vec<f64> {
        (0..n).map(|j| -PI + 2.0 * PI * j as f64 / (n - 1) as f64).collect()
    }

    fn constant_grid(n: usize, rho: f64) -> SpectrumGrid<f64> {
        SpectrumGrid::new(uniform(n), vec![1.0; n], vec![1.0; n], vec![c(rho); n], None).unwrap()
    }

    #[test]
    fn white_process_is_flat() {
        let corr = CorrelationFunctions::new(vec![0.0f64, 1.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0; 3], None).unwrap();
        let grid = spectrum_from_correlation(&corr, 16).unwrap();
        assert!(grid.s_x().iter().all(|&s| (s - 1.0).abs() < 1e-15));
        assert!(grid.s_xy().iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn ar1_spectrum_matches_closed_form() {
        let a: f64 = 0.5;
        let r: Vec<f64> = (-40i32..=40).map(|k| a.powi(k.abs())).collect();
        let corr = CorrelationFunctions::new(r.clone(), r.clone(), r, None).unwrap();
        let grid = spectrum_from_correlation(&corr, 257).unwrap();
        for (&w, &s) in grid.omegas().iter().zip(grid.s_x()) {
            let exact = (1.0 - a * a) / (1.0 - 2.0 * a * w.cos() + a * a);
            assert!((s - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn undecayed_window_rejected() {
        let r: Vec<f64> = (-5i32..=5).map(|k| 0.9f64.powi(k.abs())).collect();
        let corr = CorrelationFunctions::new(r.clone(), r.clone(), r, None).unwrap();
        assert!(matches!(spectrum_from_correlation(&corr, 64), Err(Error::NotSummable { .. })));
        let ok: Vec<f64> = (-5i32..=5).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect();
        let corr = CorrelationFunctions::new(ok.clone(), ok.clone(), ok, None).unwrap();
        assert!(matches!(spectrum_from_correlation(&corr, 12), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn constant_beta_matches_single_component() {
        let grid = constant_grid(33, 0.8);
        let betas = beta_omega(&grid).unwrap();
        let expected = beta_of(&GaussTriple::new(0.8, 0.0).unwrap());
        assert!(betas.iter().all(|&b| (b - expected.value()).abs() < 1e-14));
        let profile = BetaProfile::new(vec![expected]).unwrap();
        for mu in [0.05, 0.5, 1.5] {
            let (r, key) = process_frontier(&grid, mu).unwrap();
            let p = frontier_at(&profile, mu).unwrap();
            assert_relative_eq!(r, p.r, epsilon = 1e-14);
            assert_relative_eq!(key, p.key, epsilon = 1e-14);
        }
        assert_eq!(process_frontier(&grid, 2.0).unwrap(), (0.0, 0.0));
        let (key, _) = process_key_rate(&grid, 0.4).unwrap();
        assert_relative_eq!(key, scalar_key_rate(expected, 0.4).unwrap(), epsilon = 1e-11);
        assert_eq!(process_key_rate(&grid, 0.0).unwrap().0, 0.0);
    }

    #[test]
    fn independent_processes_have_zero_beta() {
        let betas = beta_omega(&constant_grid(9, 0.0)).unwrap();
        assert!(betas.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn strong_eavesdropper_makes_beta_negative() {
        let n = 5;
        let grid = SpectrumGrid::new(
            uniform(n),
            vec![1.0; n],
            vec![1.0; n],
            vec![c(0.5); n],
            Some((vec![1.0; n], vec![c(0.7); n])),
        )
        .unwrap();
        assert!(beta_omega(&grid).unwrap().iter().all(|&b| b < 0.0));
    }

    #[test]
    fn bandlimited_half_band() {
        // beta = 1 on |w| <= pi/2 (rho^2 = 1/2), 0 elsewhere; jumps resolved over 2e-9.
        let d = 1e-9;
        let mut omegas: Vec<f64> = vec![-PI, -PI / 2.0 - d];
        omegas.extend((0..=64).map(|k| -PI / 2.0 + PI * k as f64 / 64.0));
        omegas.extend([PI / 2.0 + d, PI]);
        let n = omegas.len();
        let s_xy: Vec<_> = omegas.iter().map(|w| c(if w.abs() <= PI / 2.0 { 0.5f64.sqrt() } else { 0.0 })).collect();
        let grid = SpectrumGrid::new(omegas, vec![1.0; n], vec![1.0; n], s_xy, None).unwrap();
        let (r, key) = process_frontier(&grid, 0.5).unwrap();
        assert!((r - 0.25 * 1.5f64.log2()).abs() < 1e-6);
        assert!((key - 0.25 * (2.0f64 / 1.5).log2()).abs() < 1e-6);
    }

    #[test]
    fn invalid_inputs() {
        let n = 4;
        assert!(matches!(process_frontier(&constant_grid(n, 0.3), 0.0), Err(Error::InvalidMu(_))));
        let coherent = constant_grid(n, 1.0);
        assert!(matches!(beta_omega(&coherent), Err(Error::DegenerateSpectrum { .. })));
        let err = SpectrumGrid::new(uniform(n), vec![1.0; n], vec![1.0; n], vec![c(1.2); n], None).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        let short = SpectrumGrid::new(vec![-1.0, 1.0], vec![1.0; 2], vec![1.0; 2], vec![c(0.0); 2], None);
        assert!(matches!(short, Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn zero_power_frequencies_carry_nothing() {
        let n = 5;
        let mut s_x = vec![1.0; n];
        s_x[2] = 0.0;
        let mut s_xy = vec![c(0.5); n];
        s_xy[2] = c(0.0);
        let grid = SpectrumGrid::new(uniform(n), s_x, vec![1.0; n], s_xy, None).unwrap();
        assert_eq!(beta_omega(&grid).unwrap()[2], 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn filtering_y_leaves_beta_unchanged(
                sx in 0.1f64..4.0, sy in 0.1f64..4.0, sz in 0.1f64..4.0,
                cxy in 0.0f64..0.95, cxz in 0.0f64..0.95, phase in -3.0f64..3.0,
                gain in 0.1f64..5.0, hphase in -3.0f64..3.0,
            ) {
                let xy = Complex::from_polar(cxy * (sx * sy).sqrt(), phase);
                let xz = Complex::from_polar(cxz * (sx * sz).sqrt(), -phase);
                let h = Complex::from_polar(gain, hphase);
                let omegas = vec![-PI, PI];
                let eaves = Some((vec![sz; 2], vec![xz, xz.conj()]));
                let base = SpectrumGrid::new(omegas.clone(), vec![sx; 2], vec![sy; 2], vec![xy, xy.conj()], eaves.clone()).unwrap();
                let filt = SpectrumGrid::new(
                    omegas,
                    vec![sx; 2],
                    vec![h.norm_sqr() * sy; 2],
                    vec![h.conj() * xy, h * xy.conj()],
                    eaves,
                ).unwrap();
                for (a, b) in beta_omega(&base).unwrap().into_iter().zip(beta_omega(&filt).unwrap()) {
                    prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
                }
            }

            #[test]
            fn monotone_in_mu(rho in 0.0f64..0.95, a in 1e-3f64..3.0, b in 1e-3f64..3.0) {
                let grid = constant_grid(17, rho);
                let (hi, lo) = if a > b { (a, b) } else { (b, a) };
                let (rh, kh) = process_frontier(&grid, hi).unwrap();
                let (rl, kl) = process_frontier(&grid, lo).unwrap();
                prop_assert!(rh <= rl && kh <= kl);
            }
        }
    }
}
