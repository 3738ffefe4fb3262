//! Exact minimum of a quadratic form over the standard simplex by support
//! enumeration.
//!
//! Every local minimizer lies in the relative interior of some face `J`, and
//! there it satisfies `2 S_JJ y = mu 1`, `sum(y) = 1`. Solving that system for
//! each of the `2^n - 1` faces and keeping the best feasible point gives the
//! global minimum. A face whose system is singular and inconsistent has no
//! interior critical point; if it is singular but consistent, the value `mu/2`
//! is constant along the solution set, which meets a smaller face where the
//! same value is found again.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{check_square, symmetric_part, CopositivityError};

/// Largest dimension accepted by [`simplex_min_exact`].
pub const EXACT_DIMENSION_LIMIT: usize = 12;

const RESIDUAL_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexMinimum {
    pub value: f64,
    pub minimizer: Vec<f64>,
    /// Faces whose stationarity system had no acceptable solution.
    pub skipped_faces: usize,
}

/// Global minimum of `x^T S x` over `{x >= 0, sum(x) = 1}`. Non-symmetric
/// input is replaced by its symmetric part, which has the same quadratic
/// form.
pub fn simplex_min_exact(s: &DMatrix<f64>, feasibility_eps: f64) -> Result<SimplexMinimum, CopositivityError> {
    check_square(s)?;
    let n = s.nrows();
    if n > EXACT_DIMENSION_LIMIT {
        return Err(CopositivityError::DimensionLimit {
            n,
            limit: EXACT_DIMENSION_LIMIT,
        });
    }
    let s = symmetric_part(s);
    let scale = s.iter().fold(1.0f64, |m, v| m.max(v.abs()));

    let mut best_value = f64::INFINITY;
    let mut best = vec![0.0; n];
    let mut skipped = 0;

    for i in 0..n {
        if s[(i, i)] < best_value {
            best_value = s[(i, i)];
            best.iter_mut().for_each(|v| *v = 0.0);
            best[i] = 1.0;
        }
    }

    for mask in 1u32..(1u32 << n) {
        let face: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let k = face.len();
        if k < 2 {
            continue;
        }
        let Some(y) = face_stationary_point(&s, &face, scale, feasibility_eps) else {
            skipped += 1;
            continue;
        };
        let mut x = vec![0.0; n];
        for (&i, &yi) in face.iter().zip(y.iter()) {
            x[i] = yi;
        }
        let value = quadratic_form(&s, &x);
        if value < best_value {
            best_value = value;
            best = x;
        }
    }

    Ok(SimplexMinimum {
        value: best_value,
        minimizer: best,
        skipped_faces: skipped,
    })
}

/// Feasible solution of the face's stationarity system, projected onto the
/// face (clamped and renormalized).
fn face_stationary_point(s: &DMatrix<f64>, face: &[usize], scale: f64, eps: f64) -> Option<Vec<f64>> {
    let k = face.len();
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (r, &i) in face.iter().enumerate() {
        for (c, &j) in face.iter().enumerate() {
            a[(r, c)] = 2.0 * s[(i, j)];
        }
        a[(r, k)] = -1.0;
        a[(k, r)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;

    let residual_ok = |sol: &DVector<f64>| {
        let r = &a * sol - &rhs;
        r.amax() <= RESIDUAL_LIMIT * scale.max(1.0) && sol.iter().all(|v| v.is_finite())
    };

    let solution = a
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|sol| residual_ok(sol))
        .or_else(|| {
            let svd = a.clone().svd(true, true);
            svd.solve(&rhs, 1e-12 * scale.max(1.0))
                .ok()
                .filter(|sol| residual_ok(sol))
        })?;

    let y: Vec<f64> = solution.iter().take(k).copied().collect();
    if y.iter().any(|&v| v < -eps) {
        return None;
    }
    let clamped: Vec<f64> = y.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if total <= 0.0 {
        return None;
    }
    Some(clamped.into_iter().map(|v| v / total).collect())
}

pub fn quadratic_form(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = m.nrows();
    let mut total = 0.0;
    for i in 0..n {
        if x[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..n {
            row += m[(i, j)] * x[j];
        }
        total += x[i] * row;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn interior_minimum_two_by_two() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, -2.0, 1.0]);
        let m = simplex_min_exact(&s, 1e-9).unwrap();
        assert!(close(m.value, -0.5, 1e-12));
        assert!(close(m.minimizer[0], 0.5, 1e-12));
    }

    #[test]
    fn nonnegative_minimum_at_vertex() {
        let s = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let m = simplex_min_exact(&s, 1e-9).unwrap();
        assert_eq!(m.value, 0.0);
        assert!(m.minimizer.contains(&1.0));
    }

    #[test]
    fn identity_minimum_at_barycenter() {
        let m = simplex_min_exact(&DMatrix::identity(3, 3), 1e-9).unwrap();
        assert!(close(m.value, 1.0 / 3.0, 1e-12));
        for v in m.minimizer {
            assert!(close(v, 1.0 / 3.0, 1e-12));
        }
    }

    #[test]
    fn singular_faces_are_covered() {
        // rank one, constant on the whole simplex
        let s = DMatrix::from_element(3, 3, 2.0);
        let m = simplex_min_exact(&s, 1e-9).unwrap();
        assert!(close(m.value, 2.0, 1e-12));
        // zero matrix
        let m = simplex_min_exact(&DMatrix::zeros(4, 4), 1e-9).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn asymmetric_input_uses_symmetric_part() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -4.0, 0.0, 1.0]);
        let r = simplex_min_exact(&m, 1e-9).unwrap();
        assert!(close(r.value, -0.5, 1e-12));
    }

    #[test]
    fn dimension_limit() {
        let s = DMatrix::<f64>::identity(13, 13);
        assert!(matches!(
            simplex_min_exact(&s, 1e-9),
            Err(CopositivityError::DimensionLimit { n: 13, .. })
        ));
    }
}
