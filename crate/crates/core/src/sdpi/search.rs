//! Simplex search for sup over Q_X of a ratio of divergences.

use nalgebra::DMatrix;
use num_traits::Float;

use super::info::{kl_perturbed, push_perturbation, tangent};
use crate::error::{Error, Result};
use crate::gauss_vector::LinalgReal;

pub(crate) const DENOMINATOR_FLOOR: f64 = 1e-12;
pub(crate) const REFINE_BUDGET: usize = 10_000;
const NEAR_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const MAX_GRID_POINTS: u128 = 5_000_000;
const REFINE_STARTS: usize = 3;
const GOLDEN_ITERS: usize = 40;
const MIN_WINDOW: f64 = 1e-9;

/// Default number of simplex steps for an input alphabet of size `nx`.
pub fn default_grid_resolution(nx: usize) -> usize {
    match nx {
        0..=2 => 60,
        3 => 24,
        _ => 12,
    }
}

/// The ratio (D_Y − D_Z)/(D_X − D_Z) over perturbations of P_X on its support.
pub(crate) struct RatioProblem<T> {
    pub px: Vec<T>,
    pub wy: Vec<Vec<T>>,
    pub py: Vec<T>,
    pub wz: Option<(Vec<Vec<T>>, Vec<T>)>,
}

#[derive(Debug, Clone)]
pub(crate) struct Found<T> {
    pub value: T,
    pub qx: Vec<T>,
    pub from_grid: bool,
}

impl<T: LinalgReal> RatioProblem<T> {
    fn m(&self) -> usize {
        self.px.len()
    }

    pub fn eval_delta(&self, delta: &[T]) -> Option<T> {
        let delta = &tangent(&self.px, delta);
        let dx = kl_perturbed(&self.px, delta);
        let dy = kl_perturbed(&self.py, &push_perturbation(delta, &self.wy));
        let dz = match &self.wz {
            Some((w, pz)) => kl_perturbed(pz, &push_perturbation(delta, w)),
            None => T::zero(),
        };
        let den = dx - dz;
        if !(den > T::lit(DENOMINATOR_FLOOR)) || !dx.is_finite() {
            return None;
        }
        Some((dy - dz) / den)
    }

    fn eval_q(&self, q: &[T]) -> Option<T> {
        let delta: Vec<T> = q.iter().zip(&self.px).map(|(&a, &b)| a - b).collect();
        self.eval_delta(&delta)
    }

    /// Top generalized eigenpair of the second-order expansions of numerator
    /// and denominator on the tangent space of the simplex.
    pub fn local_direction(&self) -> Option<(T, Vec<T>)> {
        let m = self.m();
        if m < 2 {
            return None;
        }
        let gram = |w: &[Vec<T>], p: &[T]| {
            DMatrix::from_fn(m, m, |i, j| {
                p.iter().enumerate().filter(|(_, &pk)| pk > T::zero()).fold(T::zero(), |a, (k, &pk)| a + w[i][k] * w[j][k] / pk)
            })
        };
        let kx = DMatrix::from_fn(m, m, |i, j| if i == j { T::one() / self.px[i] } else { T::zero() });
        let ky = gram(&self.wy, &self.py);
        let kz = match &self.wz {
            Some((w, pz)) => gram(w, pz),
            None => DMatrix::zeros(m, m),
        };
        let basis = DMatrix::from_fn(m, m - 1, |i, j| {
            if i == j {
                T::one()
            } else if i == m - 1 {
                -T::one()
            } else {
                T::zero()
            }
        });
        let num = basis.transpose() * (&ky - &kz) * &basis;
        let den = basis.transpose() * (&kx - &kz) * &basis;
        let den = (&den + den.transpose()) * T::half();
        let eig = den.symmetric_eigen();
        let top = eig.eigenvalues.iter().fold(T::zero(), |a, &v| Float::max(a, v));
        if !(top > T::zero()) {
            return None;
        }
        let keep: Vec<usize> = (0..m - 1).filter(|&i| eig.eigenvalues[i] > top * T::lit(1e-12)).collect();
        let scale = DMatrix::from_fn(m - 1, keep.len(), |i, j| {
            eig.eigenvectors[(i, keep[j])] / Float::sqrt(eig.eigenvalues[keep[j]])
        });
        let reduced = scale.transpose() * num * &scale;
        let reduced = (&reduced + reduced.transpose()) * T::half();
        let inner = reduced.symmetric_eigen();
        let best = (0..keep.len()).max_by(|&a, &b| {
            inner.eigenvalues[a].partial_cmp(&inner.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let dir = &basis * (&scale * inner.eigenvectors.column(best));
        let norm = dir.iter().fold(T::zero(), |a, &v| Float::max(a, Float::abs(v)));
        if !(norm > T::zero()) {
            return None;
        }
        Some((inner.eigenvalues[best], dir.iter().map(|&v| v / norm).collect()))
    }

    /// Grid, near-P_X limits and pairwise refinement. Returns the best point
    /// (if any ratio was defined) and the number of ratio evaluations.
    pub fn search(&self, resolution: usize) -> Result<(Option<Found<T>>, usize)> {
        let m = self.m();
        if resolution == 0 {
            return Err(Error::InvalidArgument("grid resolution must be positive".into()));
        }
        if binomial(resolution + m - 1, m - 1) > MAX_GRID_POINTS {
            return Err(Error::InvalidArgument(format!(
                "simplex grid with {m} letters and resolution {resolution} exceeds {MAX_GRID_POINTS} points"
            )));
        }
        let mut evals = 0usize;
        let mut top: Vec<Found<T>> = Vec::new();
        let step = T::one() / T::of_usize(resolution);
        let mut counts = vec![0usize; m];
        counts[m - 1] = resolution;
        loop {
            let q: Vec<T> = counts.iter().map(|&c| T::of_usize(c) * step).collect();
            evals += 1;
            if let Some(v) = self.eval_q(&q) {
                insert_top(&mut top, Found { value: v, qx: q, from_grid: true });
            }
            if !next_composition(&mut counts) {
                break;
            }
        }

        let mut best = top.first().cloned();
        let consider = |best: &mut Option<Found<T>>, cand: Found<T>| {
            if best.as_ref().is_none_or(|b| cand.value > b.value) {
                *best = Some(cand);
            }
        };

        let mut directions: Vec<Vec<T>> = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    let mut d = vec![T::zero(); m];
                    d[i] = T::one();
                    d[j] = -T::one();
                    directions.push(d);
                }
            }
        }
        if let Some((limit, d)) = self.local_direction() {
            let t = T::lit(NEAR_STEPS[NEAR_STEPS.len() - 1]);
            let q: Vec<T> = self.px.iter().zip(&d).map(|(&p, &di)| p + t * di).collect();
            if q.iter().all(|&v| v >= T::zero()) && limit.is_finite() {
                consider(&mut best, Found { value: limit, qx: q, from_grid: false });
            }
            directions.push(d.iter().map(|&v| -v).collect());
            directions.push(d);
        }
        let mut near_best: Option<Found<T>> = None;
        for d in &directions {
            for &t in &NEAR_STEPS {
                let t = T::lit(t);
                let q: Vec<T> = self.px.iter().zip(d).map(|(&p, &di)| p + t * di).collect();
                if q.iter().any(|&v| v < T::zero()) {
                    continue;
                }
                evals += 1;
                if let Some(v) = self.eval_q(&q) {
                    let cand = Found { value: v, qx: q, from_grid: false };
                    consider(&mut near_best, cand.clone());
                    consider(&mut best, cand);
                }
            }
        }

        let mut starts: Vec<Found<T>> = top.into_iter().take(REFINE_STARTS).collect();
        starts.extend(near_best);
        let mut budget = REFINE_BUDGET;
        let per_start = budget / starts.len().max(1);
        for s in starts {
            let allowance = per_start.min(budget);
            let (found, used) = self.refine(s, step, allowance);
            budget -= used;
            evals += used;
            if let Some(f) = found {
                consider(&mut best, f);
            }
        }
        Ok((best, evals))
    }

    fn refine(&self, start: Found<T>, window: T, budget: usize) -> (Option<Found<T>>, usize) {
        let m = self.m();
        let mut q = start.qx.clone();
        let mut value = start.value;
        let mut w = window;
        let mut used = 0usize;
        let mut improved_any = false;
        let cost = GOLDEN_ITERS + 4;
        'outer: while w > T::lit(MIN_WINDOW) {
            let before = value;
            for i in 0..m {
                for j in (i + 1)..m {
                    if used + cost > budget {
                        break 'outer;
                    }
                    let lo = Float::max(-q[i], -w);
                    let hi = Float::min(q[j], w);
                    if !(hi > lo) {
                        continue;
                    }
                    let f = |t: T| {
                        let mut c = q.clone();
                        c[i] = Float::max(c[i] + t, T::zero());
                        c[j] = Float::max(c[j] - t, T::zero());
                        (self.eval_q(&c).unwrap_or(T::neg_infinity()), c)
                    };
                    let (t_best, v_best, n) = golden_max(&|t| f(t).0, lo, hi);
                    used += n;
                    if v_best > value {
                        value = v_best;
                        q = f(t_best).1;
                        improved_any = true;
                    }
                }
            }
            if !(value > before + T::lit(1e-13)) {
                w *= T::half();
            }
        }
        let found = improved_any.then_some(Found { value, qx: q, from_grid: false });
        (found, used)
    }
}

/// Maximise `f` on `[lo, hi]`, also sampling both ends and zero. Returns
/// (argmax, max, evaluations).
fn golden_max<T: LinalgReal>(f: &dyn Fn(T) -> T, lo: T, hi: T) -> (T, T, usize) {
    let ratio = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut n = 2;
    for _ in 0..GOLDEN_ITERS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
        n += 1;
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for t in [lo, hi] {
        let v = f(t);
        n += 1;
        if v > best.1 {
            best = (t, v);
        }
    }
    (best.0, best.1, n)
}

fn insert_top<T: LinalgReal>(top: &mut Vec<Found<T>>, cand: Found<T>) {
    let pos = top.iter().position(|f| cand.value > f.value).unwrap_or(top.len());
    if pos < REFINE_STARTS {
        top.insert(pos, cand);
        top.truncate(REFINE_STARTS);
    }
}

/// Advance to the next composition of `sum(counts)` in lexicographic order.
fn next_composition(counts: &mut [usize]) -> bool {
    let m = counts.len();
    if m < 2 {
        return false;
    }
    // Rightmost position before the last that can still grow.
    let Some(k) = (0..m - 1).rev().find(|&k| counts[k + 1..].iter().any(|&c| c > 0)) else {
        return false;
    };
    let tail: usize = counts[k + 1..].iter().sum();
    counts[k] += 1;
    for c in counts[k + 1..].iter_mut() {
        *c = 0;
    }
    counts[m - 1] = tail - 1;
    true
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
