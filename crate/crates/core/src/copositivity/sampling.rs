//! Randomized search for a non-negative vector with a negative quadratic form.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::simplex::quadratic_form;

/// Draw `samples` points on the simplex, half uniform and half uniform on a
/// random face, then polish the best one with pairwise mass exchanges.
/// Returns the lowest point found and its value.
pub fn sample_minimum(s: &DMatrix<f64>, samples: usize, seed: u64) -> (Vec<f64>, f64) {
    let n = s.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = vec![1.0 / n as f64; n];
    let mut best_value = quadratic_form(s, &best);
    let mut x = vec![0.0; n];

    for k in 0..samples {
        x.iter_mut().for_each(|v| *v = 0.0);
        if k % 2 == 0 {
            for v in x.iter_mut() {
                *v = rng.sample(Exp1);
            }
        } else {
            let size = rng.random_range(1..=n);
            for i in sample(&mut rng, n, size) {
                x[i] = rng.sample(Exp1);
            }
        }
        let total: f64 = x.iter().sum();
        if total <= 0.0 {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= total);
        let value = quadratic_form(s, &x);
        if value < best_value {
            best_value = value;
            best.copy_from_slice(&x);
        }
    }

    let polished_value = polish(s, &mut best);
    (best, polished_value.min(best_value))
}

/// Local descent on the simplex: repeatedly move mass between two
/// coordinates by the exact 1-D minimizer. Returns the final value.
pub(crate) fn polish(s: &DMatrix<f64>, x: &mut [f64]) -> f64 {
    let n = x.len();
    let mut grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| s[(i, j)] * x[j]).sum()).collect();
    for _ in 0..500 {
        let mut improved = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // x_i += t, x_j -= t, t in [-x_i, x_j]
                let slope = 2.0 * (grad[i] - grad[j]);
                let curv = s[(i, i)] + s[(j, j)] - 2.0 * s[(i, j)];
                let (lo, hi) = (-x[i], x[j]);
                let t = if curv > 0.0 {
                    (-slope / (2.0 * curv)).clamp(lo, hi)
                } else if slope + curv * (lo + hi) > 0.0 {
                    lo
                } else {
                    hi
                };
                let delta = slope * t + curv * t * t;
                if t != 0.0 && delta < 0.0 {
                    x[i] += t;
                    x[j] -= t;
                    x[j] = x[j].max(0.0);
                    x[i] = x[i].max(0.0);
                    for (r, g) in grad.iter_mut().enumerate() {
                        *g += t * (s[(r, i)] - s[(r, j)]);
                    }
                    improved -= delta;
                }
            }
        }
        if improved < 1e-16 {
            break;
        }
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    quadratic_form(s, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_negative_region() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, -1.01, -1.01, 1.0]);
        let (x, v) = sample_minimum(&s, 1000, 7);
        assert!(v < -0.004, "{v}");
        assert!((x[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn deterministic_for_seed() {
        let s = DMatrix::from_row_slice(3, 3, &[1.0, -2.0, 0.5, -2.0, 3.0, -1.0, 0.5, -1.0, 0.2]);
        assert_eq!(sample_minimum(&s, 500, 3), sample_minimum(&s, 500, 3));
    }

    #[test]
    fn polish_reaches_vertex_for_concave_form() {
        let s = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -3.0]);
        let mut x = vec![0.5, 0.5];
        let v = polish(&s, &mut x);
        assert!((v + 3.0).abs() < 1e-12, "{v} {x:?}");
    }
}
