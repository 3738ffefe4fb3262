use nalgebra::DMatrix;

use super::SynergyError;

/// Synergy matrix for outcome `C` of a three-parent noisy-or gate with
/// strengths `p` (for `a`), `q` (for `b`), `r` (for `x`) and leak `l`. Row
/// and column 1 are `x` present.
///
/// The diagonal is `-(1-l)pq(1-r)`, `-(1-l)pq`; the off-diagonal entries sum
/// to `-(1-l)pq(2-r)`. The matrix for `~C` is identically zero.
pub fn noisy_or_d_closed_form(p: f64, q: f64, r: f64, l: f64) -> Result<DMatrix<f64>, SynergyError> {
    for v in [p, q, r, l] {
        if !(0.0..=1.0).contains(&v) {
            return Err(SynergyError::ParameterRange(v));
        }
    }
    let k = 1.0 - l;
    Ok(DMatrix::from_row_slice(
        2,
        2,
        &[
            -k * p * q * (1.0 - r),
            -k * p * (q + (1.0 - q) * r),
            -k * p * (q - r),
            -k * p * q,
        ],
    ))
}
