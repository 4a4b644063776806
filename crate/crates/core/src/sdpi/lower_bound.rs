//! Multi-start ascent over joint distributions Q_VX.

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::info::{kl_perturbed, mutual_information, push_forward, push_perturbation, tangent};
use super::search::{RatioProblem, DENOMINATOR_FLOOR};
use crate::gauss_vector::LinalgReal;

pub const DEFAULT_RESTARTS: usize = 32;
const MAX_ITERATIONS: usize = 300;
const GRADIENT_STEP: f64 = 1e-5;
const MIN_STEP: f64 = 1e-10;
const MAX_STEP: f64 = 4.0;

pub(crate) struct Ascent<'a, T> {
    pub problem: &'a RatioProblem<T>,
    pub v_card: usize,
    pub evaluations: usize,
}

impl<T: LinalgReal> Ascent<'_, T> {
    fn joint(&self, theta: &[T]) -> Vec<Vec<T>> {
        let top = theta.iter().fold(T::neg_infinity(), |a, &t| Float::max(a, t));
        let exps: Vec<T> = theta.iter().map(|&t| Float::exp(t - top)).collect();
        let total = exps.iter().fold(T::zero(), |a, &e| a + e);
        exps.chunks(self.problem.px.len()).map(|row| row.iter().map(|&e| e / total).collect()).collect()
    }

    fn objective(&mut self, theta: &[T]) -> Option<T> {
        self.evaluations += 1;
        let p = self.problem;
        let q = self.joint(theta);
        let mut qx = vec![T::zero(); p.px.len()];
        for row in &q {
            for (a, &v) in qx.iter_mut().zip(row) {
                *a += v;
            }
        }
        let delta = tangent(&p.px, &qx.iter().zip(&p.px).map(|(&a, &b)| a - b).collect::<Vec<_>>());
        let dx = kl_perturbed(&p.px, &delta);
        let dy = kl_perturbed(&p.py, &push_perturbation(&delta, &p.wy));
        let qvy: Vec<Vec<T>> = q.iter().map(|row| push_forward(row, &p.wy)).collect();
        let ivx = mutual_information(&q);
        let ivy = mutual_information(&qvy);
        let ivz = match &p.wz {
            Some((w, _)) => mutual_information(&q.iter().map(|row| push_forward(row, w)).collect::<Vec<_>>()),
            None => T::zero(),
        };
        let den = ivx - ivz + dx - dy;
        if !(den > T::lit(DENOMINATOR_FLOOR)) || !den.is_finite() {
            return None;
        }
        Some((ivy - ivz) / den)
    }

    /// Best value and its Q_X over `restarts` seeded starts.
    pub fn run(&mut self, restarts: usize, seed: u64) -> Option<(T, Vec<T>)> {
        let m = self.problem.px.len();
        let n = self.v_card * m;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<(T, Vec<T>)> = None;
        for restart in 0..restarts {
            let mut theta: Vec<T> = if restart % 2 == 0 {
                let spread = 10f64.powf(rng.random_range(-2.0..0.5));
                (0..n).map(|k| Float::ln(self.problem.px[k % m]) + T::lit(spread * rng.random_range(-1.0..1.0))).collect()
            } else {
                (0..n).map(|_| T::lit(rng.random_range(-2.0..2.0))).collect()
            };
            let Some(mut value) = self.objective(&theta) else { continue };
            let mut eta = T::one();
            for _ in 0..MAX_ITERATIONS {
                let grad = self.gradient(&theta);
                let scale = grad.iter().fold(T::zero(), |a, &g| Float::max(a, Float::abs(g)));
                if !(scale > T::lit(1e-14)) {
                    break;
                }
                let mut step_best: Option<(T, Vec<T>, T)> = None;
                for shrink in [1.0, 0.5, 0.25] {
                    let h = eta * T::lit(shrink);
                    let cand: Vec<T> = theta.iter().zip(&grad).map(|(&t, &g)| t + h * g / scale).collect();
                    if let Some(v) = self.objective(&cand) {
                        if step_best.as_ref().is_none_or(|b| v > b.0) {
                            step_best = Some((v, cand, h));
                        }
                    }
                }
                match step_best {
                    Some((v, cand, h)) if v > value => {
                        value = v;
                        theta = cand;
                        eta = Float::min(h * T::two(), T::lit(MAX_STEP));
                    }
                    _ => {
                        eta /= T::lit(8.0);
                        if eta < T::lit(MIN_STEP) {
                            break;
                        }
                    }
                }
            }
            if best.as_ref().is_none_or(|b| value > b.0) {
                let q = self.joint(&theta);
                let qx = (0..m).map(|x| q.iter().fold(T::zero(), |a, row| a + row[x])).collect();
                best = Some((value, qx));
            }
        }
        best
    }

    fn gradient(&mut self, theta: &[T]) -> Vec<T> {
        let h = T::lit(GRADIENT_STEP);
        let mut probe = theta.to_vec();
        (0..theta.len())
            .map(|k| {
                probe[k] = theta[k] + h;
                let up = self.objective(&probe);
                probe[k] = theta[k] - h;
                let down = self.objective(&probe);
                probe[k] = theta[k];
                match (up, down) {
                    (Some(u), Some(d)) => (u - d) / (h + h),
                    _ => T::zero(),
                }
            })
            .collect()
    }
}
