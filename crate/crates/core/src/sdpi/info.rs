//! Divergences evaluated from perturbations, so that nearly equal
//! distributions keep full relative accuracy.

use crate::gauss_vector::LinalgReal;
use num_traits::Float;

const SERIES_RADIUS: f64 = 0.25;
const SERIES_TERMS: usize = 30;

/// φ(u) = (1+u)ln(1+u) − u for u ≥ −1.
pub(crate) fn phi<T: LinalgReal>(u: T) -> T {
    if Float::abs(u) <= T::lit(SERIES_RADIUS) {
        // Σ_{k≥2} (−u)^k / (k(k−1)), summed from the smallest term.
        let mut terms = [T::zero(); SERIES_TERMS];
        let mut pow = -u;
        for (i, slot) in terms.iter_mut().enumerate() {
            let k = i + 2;
            pow *= -u;
            *slot = pow / T::of_usize(k * (k - 1));
        }
        terms.iter().rev().fold(T::zero(), |a, &t| a + t)
    } else if u <= -T::one() {
        T::one()
    } else {
        (T::one() + u) * Float::ln_1p(u) - u
    }
}

/// D(P + δ ‖ P) in bits. Coordinates with `p = 0` must carry `δ = 0`.
pub(crate) fn kl_perturbed<T: LinalgReal>(p: &[T], delta: &[T]) -> T {
    let mut acc = T::zero();
    for (&pi, &di) in p.iter().zip(delta) {
        if pi > T::zero() {
            acc += pi * phi(di / pi);
        } else if di > T::zero() {
            return T::infinity();
        }
    }
    Float::max(acc, T::zero()) / T::LN_2()
}

/// `δ · W`: the output perturbation induced by an input perturbation.
pub(crate) fn push_forward<T: LinalgReal>(delta: &[T], channel: &[Vec<T>]) -> Vec<T> {
    let n_out = channel.first().map_or(0, Vec::len);
    let mut out = vec![T::zero(); n_out];
    for (&d, row) in delta.iter().zip(channel) {
        for (o, &w) in out.iter_mut().zip(row) {
            *o += d * w;
        }
    }
    out
}

/// Remove the component of `delta` along `p` so that it sums to zero;
/// rounding in `Q − P` would otherwise leak into the ratio.
pub(crate) fn tangent<T: LinalgReal>(p: &[T], delta: &[T]) -> Vec<T> {
    let drift = delta.iter().fold(T::zero(), |a, &d| a + d);
    delta.iter().zip(p).map(|(&d, &pi)| d - drift * pi).collect()
}

/// Output perturbation of a zero-sum input perturbation, written as
/// `Σ_i δ_i (W_i − W_last)` so independent rows cancel exactly.
pub(crate) fn push_perturbation<T: LinalgReal>(delta: &[T], channel: &[Vec<T>]) -> Vec<T> {
    let Some(last) = channel.last() else { return Vec::new() };
    let mut out = vec![T::zero(); last.len()];
    for (&d, row) in delta.iter().zip(channel) {
        for ((o, &w), &l) in out.iter_mut().zip(row).zip(last) {
            *o += d * (w - l);
        }
    }
    out
}

/// Row-stochastic channel `P(b | a)` from a joint table `P(a, b)`; rows with
/// zero mass become uniform.
pub(crate) fn channel_of<T: LinalgReal>(joint: &[Vec<T>]) -> Vec<Vec<T>> {
    joint
        .iter()
        .map(|row| {
            let mass = row.iter().fold(T::zero(), |a, &v| a + v);
            if mass > T::zero() {
                row.iter().map(|&v| v / mass).collect()
            } else {
                vec![T::one() / T::of_usize(row.len()); row.len()]
            }
        })
        .collect()
}

/// I(V; B) in bits for the joint table `q[v][b]`.
pub(crate) fn mutual_information<T: LinalgReal>(q: &[Vec<T>]) -> T {
    let nb = q.first().map_or(0, Vec::len);
    let mut qb = vec![T::zero(); nb];
    for row in q {
        for (m, &v) in qb.iter_mut().zip(row) {
            *m += v;
        }
    }
    let mut acc = T::zero();
    for row in q {
        let qv = row.iter().fold(T::zero(), |a, &v| a + v);
        if qv <= T::zero() {
            continue;
        }
        let delta: Vec<T> = row.iter().zip(&qb).map(|(&v, &m)| v / qv - m).collect();
        acc += qv * kl_perturbed(&qb, &delta);
    }
    acc
}
