//! Water-filling over product Gaussian sources, and a generic equal-slope
//! allocator for arbitrary concave rate curves.
//!
//! For a product source the optimal key rate splits the communication budget
//! across components so that every active component sits at the same marginal
//! slope `mu` (the water level). For Gaussian components the curve is explicit
//! in `mu`:
//!
//! ```text
//! r(mu) = 1/2 sum_{beta_i > mu} log2(beta_i (mu + 1) / ((beta_i + 1) mu))
//! R(mu) = 1/2 sum_{beta_i > mu} log2((beta_i + 1) / (mu + 1))
//! ```
//!
//! [`key_rate`] inverts `r(mu)` by bisection; [`allocate_generic`] solves the
//! same problem from sampled curves and numeric slopes only, so each can be
//! checked against the other.

use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Real};
use crate::sk::{beta_of, key_rate_unchecked, Beta, GaussTriple};

const MAX_BISECTIONS: usize = 200;
const MU_ABS_TOL: f64 = 1e-12;
/// Lower end of the emitted mu grid, relative to the largest beta.
pub const MU_GRID_FLOOR: f64 = 1e-6;
/// Finite-difference step (bits) used for numeric slopes.
pub const SLOPE_STEP: f64 = 1e-6;
const CONCAVITY_SAMPLES: usize = 64;

/// Per-component parameters of a product source.
///
/// Each component may carry a positive weight that scales both its rate
/// contributions; unit weights describe an ordinary product of `n` sources.
/// Fractional weights arise when a spectrum is split into frequency bands.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaProfile<T> {
    betas: Vec<Beta<T>>,
    weights: Vec<T>,
}

impl<T: Real> BetaProfile<T> {
    pub fn new(betas: Vec<Beta<T>>) -> Result<Self> {
        let weights = vec![T::one(); betas.len()];
        Self::with_weights(betas, weights)
    }

    pub fn with_weights(betas: Vec<Beta<T>>, weights: Vec<T>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::EmptyProfile);
        }
        if betas.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} betas but {} weights",
                betas.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > T::zero())) {
            return Err(Error::InvalidWeight(w.as_f64()));
        }
        Ok(Self { betas, weights })
    }

    /// Build from raw beta values (negative values are allowed and clamp to 0).
    pub fn from_values(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&b| Beta::new(b)).collect::<Result<_>>()?)
    }

    pub fn from_triples(triples: &[GaussTriple<T>]) -> Result<Self> {
        Self::new(triples.iter().map(beta_of).collect())
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn betas(&self) -> &[Beta<T>] {
        &self.betas
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Largest clamped beta.
    pub fn max_beta_plus(&self) -> T {
        self.betas.iter().fold(T::zero(), |m, b| m.max(b.plus()))
    }
}

/// One point on the frontier, parameterised by the water level `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint<T> {
    pub mu: T,
    /// Total public communication rate, bits.
    pub r: T,
    /// Total key rate, bits.
    pub key: T,
    /// Communication assigned to each component, bits; sums to `r`.
    pub allocations: Vec<T>,
}

impl<T: Real> RatePoint<T> {
    fn zero(mu: T, n: usize) -> Self {
        Self { mu, r: T::zero(), key: T::zero(), allocations: vec![T::zero(); n] }
    }
}

/// Frontier samples ordered by strictly decreasing `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve<T> {
    points: Vec<RatePoint<T>>,
}

impl<T: Real> RateCurve<T> {
    pub fn new(points: Vec<RatePoint<T>>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[0].mu > w[1].mu)) {
            return Err(Error::InvalidArgument("curve points must have strictly decreasing mu".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[RatePoint<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<RatePoint<T>> {
        self.points
    }

    /// Whether the piecewise-linear interpolation of `(r, R)` is concave and
    /// nondecreasing, up to `tol`.
    pub fn is_concave(&self, tol: T) -> bool {
        let pts = &self.points;
        if pts.windows(2).any(|w| w[1].r < w[0].r - tol || w[1].key < w[0].key - tol) {
            return false;
        }
        let slopes: Vec<T> = pts
            .windows(2)
            .filter(|w| w[1].r - w[0].r > tol)
            .map(|w| (w[1].key - w[0].key) / (w[1].r - w[0].r))
            .collect();
        slopes.windows(2).all(|s| s[1] <= s[0] + tol)
    }
}

fn check_mu<T: Real>(mu: T) -> Result<()> {
    if mu > T::zero() && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidMu(mu.as_f64()))
    }
}

/// Frontier point at water level `mu`.
///
/// Components with `beta+ <= mu` stay silent.
pub fn frontier_at<T: Real>(profile: &BetaProfile<T>, mu: T) -> Result<RatePoint<T>> {
    check_mu(mu)?;
    Ok(frontier_unchecked(profile, mu))
}

fn frontier_unchecked<T: Real>(profile: &BetaProfile<T>, mu: T) -> RatePoint<T> {
    let mut allocations = Vec::with_capacity(profile.len());
    let mut keys = Vec::with_capacity(profile.len());
    let level = mu.recip().ln_1p();
    for (beta, &w) in profile.betas.iter().zip(&profile.weights) {
        let b = beta.plus();
        if b > mu {
            // log2(b (mu+1) / ((b+1) mu)) = log2(1 + 1/mu) - log2(1 + 1/b)
            allocations.push(w * T::half() * (level - b.recip().ln_1p()) / T::LN_2());
            keys.push(w * T::half() * (b.ln_1p() - mu.ln_1p()) / T::LN_2());
        } else {
            allocations.push(T::zero());
            keys.push(T::zero());
        }
    }
    RatePoint {
        mu,
        r: ordered_sum(allocations.iter().copied()),
        key: ordered_sum(keys),
        allocations,
    }
}

fn rate_at<T: Real>(profile: &BetaProfile<T>, mu: T) -> T {
    frontier_unchecked(profile, mu).r
}

/// Largest key rate achievable with `r_budget` bits of communication, and the
/// water level and split that achieve it.
///
/// Returns a zero point when every `beta+` vanishes or the budget is zero.
pub fn key_rate<T: Real>(profile: &BetaProfile<T>, r_budget: T) -> Result<(T, RatePoint<T>)> {
    if r_budget.is_nan() || r_budget < T::zero() {
        return Err(Error::NegativeRate(r_budget.as_f64()));
    }
    if r_budget.is_infinite() {
        return Err(Error::InvalidArgument("budget must be finite; see asymptote()".into()));
    }
    let top = profile.max_beta_plus();
    if top == T::zero() {
        return Ok((T::zero(), RatePoint::zero(T::one(), profile.len())));
    }
    if r_budget == T::zero() {
        return Ok((T::zero(), RatePoint::zero(top, profile.len())));
    }

    let mu = invert_rate(top, r_budget, |mu| rate_at(profile, mu))?;
    let point = frontier_unchecked(profile, mu);
    Ok((point.key, point))
}

/// Solve `rate(mu) = r_budget` for a rate function that is nonincreasing in
/// `mu` with `rate(top) = 0`, by bisection on `ln mu`.
pub(crate) fn invert_rate<T: Real>(top: T, r_budget: T, rate: impl Fn(T) -> T) -> Result<T> {
    let mut hi = top;
    let mut lo = top * T::half();
    while rate(lo) < r_budget {
        hi = lo;
        lo = lo * T::half();
        if lo < T::min_positive_value() {
            return Err(Error::ToleranceNotMet(format!(
                "could not bracket water level for budget {r_budget}"
            )));
        }
    }
    let tol = T::lit(MU_ABS_TOL).max(T::epsilon() * T::lit(4.0));
    for _ in 0..MAX_BISECTIONS {
        let mid = (lo * hi).sqrt();
        if hi - lo <= tol * hi.min(T::one()) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if rate(mid) >= r_budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::ToleranceNotMet(format!(
        "bisection on mu stalled in [{lo}, {hi}] after {MAX_BISECTIONS} steps"
    )))
}

/// `lim_{r -> inf} R(r) = 1/2 sum_i w_i log2(1 + beta_i+)`.
pub fn asymptote<T: Real>(profile: &BetaProfile<T>) -> T {
    ordered_sum(
        profile
            .betas
            .iter()
            .zip(&profile.weights)
            .map(|(b, &w)| w * T::half() * b.plus().ln_1p() / T::LN_2()),
    )
}

/// `lim_{r -> 0} R(r) / r = max_i beta_i+`.
pub fn initial_efficiency<T: Real>(profile: &BetaProfile<T>) -> T {
    profile.max_beta_plus()
}

/// Water levels at which the frontier is sampled for output.
///
/// A geometric grid from `max beta+` down to `max beta+ * 1e-6`, merged with the
/// breakpoints `mu = beta_i+` where the active set changes. The geometric part
/// has `points - breakpoints` entries (at least two), so the total is `points`
/// whenever that leaves room. For an all-zero profile the grid spans `[1e-6, 1]`.
pub fn mu_grid<T: Real>(profile: &BetaProfile<T>, points: usize) -> Vec<T> {
    let breaks: Vec<T> = profile.betas.iter().map(|b| b.plus()).collect();
    level_grid(profile.max_beta_plus(), &breaks, points)
}

/// Geometric levels from `top` to `top * 1e-6` plus any `breakpoints` strictly
/// inside that range, sorted in decreasing order without duplicates.
pub fn level_grid<T: Real>(top: T, breakpoints: &[T], points: usize) -> Vec<T> {
    let floor_ratio = T::lit(MU_GRID_FLOOR);
    let (top, floor) = if top > T::zero() { (top, top * floor_ratio) } else { (T::one(), floor_ratio) };
    let mut breaks: Vec<T> = breakpoints.iter().copied().filter(|&b| b > floor && b < top).collect();
    breaks.sort_by(|a, b| b.partial_cmp(a).expect("finite breakpoints"));
    breaks.dedup();
    let geometric = points.saturating_sub(breaks.len()).max(2);
    let step = floor_ratio.ln() / T::of_usize(geometric - 1);
    let mut grid: Vec<T> = (0..geometric)
        .map(|k| match k {
            0 => top,
            k if k + 1 == geometric => floor,
            k => top * (step * T::of_usize(k)).exp(),
        })
        .chain(breaks)
        .collect();
    grid.sort_by(|a, b| b.partial_cmp(a).expect("finite grid"));
    let merge_tol = T::lit(1e-12);
    grid.dedup_by(|a, b| (*a - *b).abs() <= merge_tol * b.abs());
    grid
}

/// Sample the frontier on [`mu_grid`].
pub fn frontier_curve<T: Real>(profile: &BetaProfile<T>, points: usize) -> Result<RateCurve<T>> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 curve points, got {points}")));
    }
    RateCurve::new(mu_grid(profile, points).into_iter().map(|mu| frontier_unchecked(profile, mu)).collect())
}

/// Convenience: the scalar Gaussian curve for one component, usable as an
/// input to [`allocate_generic`].
pub fn gaussian_curve<T: Real>(beta: Beta<T>) -> impl Fn(T) -> T + Clone {
    let b = beta.plus();
    move |r| key_rate_unchecked(b, r)
}

/// Numeric slope of `curve` at `r`: central difference, forward near zero.
pub fn numeric_slope<T: Real>(curve: &impl Fn(T) -> T, r: T) -> T {
    let h = T::lit(SLOPE_STEP);
    if r >= h {
        (curve(r + h) - curve(r - h)) / (T::two() * h)
    } else {
        (curve(r + h) - curve(r)) / h
    }
}

fn check_concave<T: Real>(curve: &impl Fn(T) -> T, budget: T, index: usize) -> Result<()> {
    let n = CONCAVITY_SAMPLES;
    let xs: Vec<T> = (0..=n).map(|k| budget * T::of_usize(k) / T::of_usize(n)).collect();
    let ys: Vec<T> = xs.iter().map(|&x| curve(x)).collect();
    let scale = ys.iter().fold(T::one(), |m, y| m.max(y.abs()));
    let tol = T::lit(1e-9) * scale;
    let bad = ys.iter().any(|y| !y.is_finite())
        || ys[0].abs() > tol
        || ys.windows(2).any(|w| w[1] < w[0] - tol)
        || ys.windows(3).any(|w| w[0] - T::two() * w[1] + w[2] > tol);
    if bad {
        Err(Error::NonConcaveInput { index })
    } else {
        Ok(())
    }
}

/// `sup { r in [0, budget] : slope(r) >= mu }`, 0 if the slope starts below `mu`.
fn rate_for_slope<T: Real>(curve: &impl Fn(T) -> T, mu: T, budget: T) -> T {
    if numeric_slope(curve, T::zero()) < mu {
        return T::zero();
    }
    if numeric_slope(curve, budget) >= mu {
        return budget;
    }
    let (mut lo, mut hi) = (T::zero(), budget);
    for _ in 0..MAX_BISECTIONS {
        let mid = T::half() * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if numeric_slope(curve, mid) >= mu {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    T::half() * (lo + hi)
}

/// Maximise `sum_i R_i(r_i)` subject to `sum_i r_i <= r_budget` by equalising
/// numeric slopes across the concave, nondecreasing `curves` (each with
/// `R_i(0) = 0`).
///
/// Returns the total key rate and the per-curve allocation.
pub fn allocate_generic<T: Real, F: Fn(T) -> T>(curves: &[F], r_budget: T) -> Result<(T, Vec<T>)> {
    if curves.is_empty() {
        return Err(Error::EmptyProfile);
    }
    if r_budget.is_nan() || r_budget < T::zero() {
        return Err(Error::NegativeRate(r_budget.as_f64()));
    }
    if !r_budget.is_finite() {
        return Err(Error::InvalidArgument("budget must be finite".into()));
    }
    if r_budget == T::zero() {
        return Ok((T::zero(), vec![T::zero(); curves.len()]));
    }
    for (i, c) in curves.iter().enumerate() {
        check_concave(c, r_budget, i)?;
    }

    let total = |mu: T| -> Vec<T> { curves.iter().map(|c| rate_for_slope(c, mu, r_budget)).collect() };
    let sum = |v: &[T]| ordered_sum(v.iter().copied());

    let top = curves.iter().fold(T::zero(), |m, c| m.max(numeric_slope(c, T::zero())));
    if top <= T::zero() {
        return Ok((T::zero(), vec![T::zero(); curves.len()]));
    }
    let mut alloc_lo = total(T::zero());
    let allocations = if sum(&alloc_lo) <= r_budget {
        // Curves flatten before the budget is exhausted.
        alloc_lo
    } else {
        let (mut lo, mut hi) = (T::zero(), top);
        let mut alloc_hi = total(hi);
        for _ in 0..MAX_BISECTIONS {
            let mid = T::half() * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let a = total(mid);
            if sum(&a) >= r_budget {
                lo = mid;
                alloc_lo = a;
            } else {
                hi = mid;
                alloc_hi = a;
            }
        }
        // Blend the bracketing allocations so the budget is met exactly; this
        // also splits evenly between curves with identical slopes.
        let (s_lo, s_hi) = (sum(&alloc_lo), sum(&alloc_hi));
        let theta = if s_lo > s_hi { (r_budget - s_hi) / (s_lo - s_hi) } else { T::zero() };
        alloc_hi.iter().zip(&alloc_lo).map(|(&h, &l)| h + theta * (l - h)).collect()
    };
    let key = ordered_sum(curves.iter().zip(&allocations).map(|(c, &r)| c(r)));
    Ok((key, allocations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sk::scalar_key_rate;
    use approx::assert_relative_eq;

    fn profile(values: &[f64]) -> BetaProfile<f64> {
        BetaProfile::from_values(values).unwrap()
    }

    #[test]
    fn frontier_example_single_active_component() {
        let p = frontier_at(&profile(&[1.0, 0.5]), 0.75).unwrap();
        assert_relative_eq!(p.r, 0.5 * (7.0f64 / 6.0).log2(), epsilon = 1e-15);
        assert_relative_eq!(p.key, 0.5 * (8.0f64 / 7.0).log2(), epsilon = 1e-15);
        assert_eq!(p.allocations[1], 0.0);
        assert_relative_eq!(p.allocations[0], p.r, epsilon = 0.0);
    }

    #[test]
    fn frontier_empty_active_set() {
        let p = frontier_at(&profile(&[0.4]), 0.4).unwrap();
        assert_eq!((p.r, p.key, p.allocations.clone()), (0.0, 0.0, vec![0.0]));
        let p = frontier_at(&profile(&[0.0, -2.0, 0.0]), 0.01).unwrap();
        assert_eq!((p.r, p.key), (0.0, 0.0));
        assert!(matches!(frontier_at(&profile(&[1.0]), 0.0), Err(Error::InvalidMu(_))));
        assert!(matches!(frontier_at(&profile(&[1.0]), -1.0), Err(Error::InvalidMu(_))));
    }

    #[test]
    fn key_rate_single_component_matches_scalar() {
        let (r, _) = key_rate(&profile(&[1.0]), 0.5).unwrap();
        let scalar = scalar_key_rate(Beta::new(1.0).unwrap(), 0.5).unwrap();
        assert_relative_eq!(r, scalar, epsilon = 1e-12);
    }

    #[test]
    fn key_rate_edges() {
        assert_eq!(key_rate(&profile(&[1.0, 0.5]), 0.0).unwrap().0, 0.0);
        assert_eq!(key_rate(&profile(&[0.0, -1.0]), 3.0).unwrap().0, 0.0);
        assert!(matches!(key_rate(&profile(&[1.0]), -0.1), Err(Error::NegativeRate(_))));
        assert!(BetaProfile::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn water_level_round_trip() {
        let p = profile(&[1.0, 0.5, 2.5]);
        for mu in [0.9, 0.5, 0.1] {
            let r = frontier_at(&p, mu).unwrap().r;
            let (_, point) = key_rate(&p, r).unwrap();
            assert!((point.mu - mu).abs() < 1e-8, "mu {mu} recovered as {}", point.mu);
        }
    }

    #[test]
    fn asymptote_examples() {
        assert_relative_eq!(asymptote(&profile(&[1.0])), 0.5, epsilon = 1e-15);
        assert_eq!(asymptote(&profile(&[0.0, 0.0])), 0.0);
        assert_relative_eq!(asymptote(&profile(&[1.0, 3.0])), 1.5, epsilon = 1e-15);
        let p = profile(&[1.0, 0.5]);
        assert!((key_rate(&p, 50.0).unwrap().0 - asymptote(&p)).abs() < 1e-4);
    }

    #[test]
    fn initial_efficiency_examples() {
        assert_relative_eq!(initial_efficiency(&profile(&[0.28 / 0.36, 0.0])), 0.28 / 0.36);
        assert_eq!(initial_efficiency(&profile(&[0.0])), 0.0);
        let h = 1e-5;
        let slope = key_rate(&profile(&[1.0, 0.5]), h).unwrap().0 / h;
        assert!((slope - 1.0).abs() < 0.01);
    }

    #[test]
    fn generic_allocator_symmetric_and_single() {
        let c = gaussian_curve(Beta::new(0.8).unwrap());
        let (total, alloc) = allocate_generic(&[c.clone(), c.clone()], 1.2).unwrap();
        assert_relative_eq!(alloc[0], 0.6, epsilon = 1e-9);
        assert_relative_eq!(alloc[1], 0.6, epsilon = 1e-9);
        assert_relative_eq!(total, 2.0 * c(0.6), epsilon = 1e-9);

        let (total, alloc) = allocate_generic(std::slice::from_ref(&c), 0.7).unwrap();
        assert_relative_eq!(alloc[0], 0.7, epsilon = 1e-12);
        assert_relative_eq!(total, c(0.7), epsilon = 1e-12);
    }

    #[test]
    fn generic_allocator_matches_closed_form() {
        let p = profile(&[1.0, 0.5]);
        let point = frontier_at(&p, 0.3).unwrap();
        let curves: Vec<_> = p.betas().iter().map(|&b| gaussian_curve(b)).collect();
        let (total, alloc) = allocate_generic(&curves, point.r).unwrap();
        assert!((total - point.key).abs() < 1e-6);
        for (a, b) in alloc.iter().zip(&point.allocations) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn generic_allocator_rejects_convex_curve() {
        let convex = |r: f64| r * r;
        let lin = |r: f64| 0.5 * r;
        let curves: Vec<Box<dyn Fn(f64) -> f64>> = vec![Box::new(lin), Box::new(convex)];
        assert_eq!(allocate_generic(&curves, 1.0), Err(Error::NonConcaveInput { index: 1 }));
    }

    #[test]
    fn mu_grid_with_breakpoints() {
        let grid = mu_grid(&profile(&[1.0, 0.5]), 3);
        assert_eq!(grid, vec![1.0, 0.5, 1e-6]);
        let grid = mu_grid(&profile(&[2.0]), 5);
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], 2.0);
        assert_relative_eq!(grid[4], 2e-6);
        assert_relative_eq!(grid[1] / grid[0], grid[2] / grid[1], epsilon = 1e-12);
        let zero = mu_grid(&profile(&[0.0]), 4);
        assert_eq!(zero.len(), 4);
        assert_eq!(zero[0], 1.0);
    }

    #[test]
    fn frontier_curve_is_concave() {
        let curve = frontier_curve(&profile(&[2.0, 0.7, 0.1]), 64).unwrap();
        assert!(curve.is_concave(1e-12));
        let pts = curve.points();
        assert!(pts.windows(2).all(|w| w[1].r > w[0].r));
    }

    #[test]
    fn weighted_profile_scales_rates() {
        let unit = frontier_at(&profile(&[1.5]), 0.2).unwrap();
        let half = BetaProfile::with_weights(vec![Beta::new(1.5).unwrap()], vec![0.5]).unwrap();
        let p = frontier_at(&half, 0.2).unwrap();
        assert_relative_eq!(p.r, 0.5 * unit.r, epsilon = 1e-15);
        assert_relative_eq!(p.key, 0.5 * unit.key, epsilon = 1e-15);
        assert!(BetaProfile::with_weights(vec![Beta::new(1.0).unwrap()], vec![0.0]).is_err());
    }

    mod props {
        use super::super::*;
        use crate::sk::{scalar_key_rate, scalar_slope};
        use proptest::collection::vec;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn monotone_in_mu(betas in vec(0.0f64..5.0, 1..6), a in 1e-4f64..5.0, b in 1e-4f64..5.0) {
                let p = BetaProfile::from_values(&betas).unwrap();
                let (hi, lo) = if a > b { (a, b) } else { (b, a) };
                let (ph, pl) = (frontier_at(&p, hi).unwrap(), frontier_at(&p, lo).unwrap());
                prop_assert!(ph.r <= pl.r);
                prop_assert!(ph.key <= pl.key);
            }

            #[test]
            fn splitting_never_beats_water_filling(
                betas in vec(0.0f64..4.0, 1..6),
                shares in vec(0.0f64..1.0, 6),
                budget in 0.0f64..4.0,
            ) {
                let p = BetaProfile::from_values(&betas).unwrap();
                let best = key_rate(&p, budget).unwrap().0;
                let weights = &shares[..betas.len()];
                let total: f64 = weights.iter().sum::<f64>().max(1e-12);
                let split: f64 = p.betas().iter().zip(weights)
                    .map(|(&b, w)| scalar_key_rate(b, budget * w / total).unwrap())
                    .sum();
                prop_assert!(split <= best + 1e-9);
            }

            #[test]
            fn permutation_invariant(betas in vec(0.0f64..4.0, 2..6), budget in 0.0f64..3.0) {
                let p = BetaProfile::from_values(&betas).unwrap();
                let mut rev = betas.clone();
                rev.reverse();
                let q = BetaProfile::from_values(&rev).unwrap();
                let (a, pa) = key_rate(&p, budget).unwrap();
                let (b, pb) = key_rate(&q, budget).unwrap();
                prop_assert!((a - b).abs() <= 1e-12);
                let n = betas.len();
                for i in 0..n {
                    prop_assert!((pa.allocations[i] - pb.allocations[n - 1 - i]).abs() <= 1e-9);
                }
            }

            #[test]
            fn active_set_slope_condition(betas in vec(0.0f64..4.0, 1..6), budget in 1e-3f64..3.0) {
                let p = BetaProfile::from_values(&betas).unwrap();
                let (_, point) = key_rate(&p, budget).unwrap();
                for (&b, &r) in p.betas().iter().zip(&point.allocations) {
                    if r > 0.0 {
                        let numeric = numeric_slope(&gaussian_curve(b), r);
                        prop_assert!((numeric - point.mu).abs() < 1e-6);
                        prop_assert!((scalar_slope(b, r).unwrap() - point.mu).abs() < 1e-6);
                    } else {
                        prop_assert!(b.plus() <= point.mu + 1e-9);
                    }
                }
            }
        }
    }
}
