//! Heuristic test for X − Y − Z: fit a channel Y → Z by projected gradient.

use num_traits::Float;

use crate::gauss_vector::LinalgReal;

pub(crate) const DEGRADED_TOL: f64 = 1e-6;
const ITERATIONS: usize = 5000;

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex<T: LinalgReal>(v: &[T]) -> Vec<T> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cum = T::zero();
    let mut theta = T::zero();
    for (k, &s) in sorted.iter().enumerate() {
        cum += s;
        let t = (cum - T::one()) / T::of_usize(k + 1);
        if s - t > T::zero() {
            theta = t;
        }
    }
    v.iter().map(|&x| Float::max(x - theta, T::zero())).collect()
}

/// Largest entrywise mismatch of the best channel found: `max |A·W − B|`
/// with `A = P_{Y|X}` and `B = P_{Z|X}` (rows over the support of X).
pub(crate) fn channel_fit_residual<T: LinalgReal>(a: &[Vec<T>], b: &[Vec<T>]) -> T {
    let nx = a.len();
    let ny = a.first().map_or(0, Vec::len);
    let nz = b.first().map_or(0, Vec::len);
    if nx == 0 || ny == 0 || nz == 0 {
        return T::zero();
    }
    let frob2 = a.iter().flatten().fold(T::zero(), |s, &v| s + v * v);
    let step = T::one() / Float::max(frob2, T::lit(1e-300));
    let mut w = vec![vec![T::one() / T::of_usize(nz); nz]; ny];
    let residual = |w: &[Vec<T>]| -> Vec<Vec<T>> {
        (0..nx)
            .map(|x| (0..nz).map(|z| (0..ny).fold(T::zero(), |s, y| s + a[x][y] * w[y][z]) - b[x][z]).collect())
            .collect()
    };
    let max_abs = |r: &[Vec<T>]| r.iter().flatten().fold(T::zero(), |m, &v| Float::max(m, Float::abs(v)));
    let mut best = max_abs(&residual(&w));
    // Accelerated projected gradient on ½‖AW − B‖².
    let mut prev = w.clone();
    let mut momentum = T::one();
    for _ in 0..ITERATIONS {
        if best <= T::lit(DEGRADED_TOL) * T::lit(1e-3) {
            break;
        }
        let next_m = (T::one() + Float::sqrt(T::one() + T::lit(4.0) * momentum * momentum)) * T::half();
        let beta = (momentum - T::one()) / next_m;
        momentum = next_m;
        let look: Vec<Vec<T>> = w.iter().zip(&prev).map(|(r, p)| r.iter().zip(p).map(|(&c, &o)| c + beta * (c - o)).collect()).collect();
        let res = residual(&look);
        let grad: Vec<Vec<T>> = (0..ny)
            .map(|y| (0..nz).map(|z| (0..nx).fold(T::zero(), |s, x| s + a[x][y] * res[x][z])).collect())
            .collect();
        prev = w;
        w = look
            .iter()
            .zip(&grad)
            .map(|(row, g)| project_simplex(&row.iter().zip(g).map(|(&v, &gv)| v - step * gv).collect::<Vec<_>>()))
            .collect();
        best = Float::min(best, max_abs(&residual(&w)));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_lands_on_the_simplex() {
        let p = project_simplex(&[0.8, 0.6, -0.2]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.4).abs() < 1e-15 && p[2] == 0.0);
    }

    #[test]
    fn erasure_of_y_is_recognised() {
        let a = vec![vec![0.9, 0.1], vec![0.1, 0.9]];
        let b = vec![vec![0.45, 0.05, 0.5], vec![0.05, 0.45, 0.5]];
        assert!(channel_fit_residual(&a, &b) <= DEGRADED_TOL);
    }

    #[test]
    fn a_better_observer_is_not_degraded() {
        let a = vec![vec![0.7, 0.3], vec![0.3, 0.7]];
        let b = vec![vec![0.95, 0.05], vec![0.05, 0.95]];
        assert!(channel_fit_residual(&a, &b) > 1e-2);
    }
}
