//! Half positive / half negative semi-definiteness of square matrices.
//!
//! `M` is half positive semi-definite when `x^T M x >= 0` for every
//! non-negative `x`, i.e. when its symmetric part is copositive. The
//! classifier runs cheap sufficient tests first (diagonal screen,
//! non-negative form, eigenvalues, a PSD-plus-non-negative decomposition) so
//! that a positive answer usually carries a self-checking certificate, then
//! falls back to exact minimization over the simplex for `n <= 12` and to
//! random search beyond that.

mod sampling;
mod simplex;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Serialize, Serializer};

pub use sampling::sample_minimum;
pub use simplex::{quadratic_form, simplex_min_exact, SimplexMinimum, EXACT_DIMENSION_LIMIT};

pub const DEFAULT_EPS: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 0x5eed_1993;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CopositivityError {
    #[error("matrix is {rows}x{cols}, expected a non-empty square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("dimension {n} exceeds the exact-test limit of {limit}")]
    DimensionLimit { n: usize, limit: usize },
}

pub(crate) fn check_square(m: &DMatrix<f64>) -> Result<(), CopositivityError> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(CopositivityError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(CopositivityError::NonFinite);
    }
    Ok(())
}

fn scale_of(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(1.0f64, |acc, v| acc.max(v.abs()))
}

/// `(M + M^T) / 2`; it has the same quadratic form as `M`.
pub fn symmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// True when the diagonal is non-negative and every symmetric pair of
/// off-diagonal entries has a non-negative sum, all within `eps`.
pub fn nonnegative_form_check(m: &DMatrix<f64>, eps: f64) -> bool {
    let n = m.nrows();
    (0..n).all(|i| m[(i, i)] >= -eps)
        && (0..n).all(|i| (i + 1..n).all(|j| m[(i, j)] + m[(j, i)] >= -eps))
}

/// Smallest eigenvalue of the symmetric part.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> Result<f64, CopositivityError> {
    check_square(m)?;
    let eig = SymmetricEigen::new(symmetric_part(m));
    Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Positive semi-definiteness of the symmetric part, with tolerance scaled
/// by `max(1, max |m_ij|)`.
pub fn psd_check(m: &DMatrix<f64>, eps: f64) -> Result<bool, CopositivityError> {
    Ok(min_eigenvalue(m)? >= -eps * scale_of(m))
}

/// A split of the symmetric part into a PSD and an entrywise non-negative
/// matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    #[serde(serialize_with = "rows")]
    pub psd: DMatrix<f64>,
    #[serde(serialize_with = "rows")]
    pub nonneg: DMatrix<f64>,
}

impl Decomposition {
    /// Re-check both parts and their sum against `m`'s symmetric part.
    pub fn verify(&self, m: &DMatrix<f64>, eps: f64) -> bool {
        let s = symmetric_part(m);
        let resum = (&self.psd + &self.nonneg - &s).amax() <= 1e-9 * scale_of(&s);
        resum
            && self.nonneg.iter().all(|&v| v >= -eps)
            && psd_check(&self.psd, eps).unwrap_or(false)
    }
}

/// Heuristic PSD-plus-non-negative split of `sym(M)`. Tries, in order:
/// the whole matrix as PSD, the whole matrix as non-negative, and moving
/// every positive off-diagonal entry into the non-negative part. `None` does
/// not prove the matrix is not half positive semi-definite, except for 2x2.
pub fn decompose_psd_plus_nonneg(m: &DMatrix<f64>, eps: f64) -> Option<Decomposition> {
    check_square(m).ok()?;
    let s = symmetric_part(m);
    let n = s.nrows();
    if psd_check(&s, eps).ok()? {
        return Some(Decomposition {
            psd: s,
            nonneg: DMatrix::zeros(n, n),
        });
    }
    if s.iter().all(|&v| v >= -eps) {
        return Some(Decomposition {
            psd: DMatrix::zeros(n, n),
            nonneg: s,
        });
    }
    let nonneg = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { s[(i, j)].max(0.0) });
    let psd = &s - &nonneg;
    psd_check(&psd, eps).ok()?.then_some(Decomposition { psd, nonneg })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    HalfPosSemiDef,
    HalfNegSemiDef,
    ZeroMatrix,
    Neither,
    /// Dimension above the exact limit, no certificate and no counterexample.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ZeroCheck,
    DiagonalScreen,
    NonnegativeForm,
    Eigenvalues,
    Decomposition,
    ExactSimplex,
    Sampling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// The quadratic form vanishes on the whole cone.
    ZeroForm,
    Decomposition(Decomposition),
    /// Exact simplex minimum of the side's form (`M` or `-M`).
    SimplexMinimum { value: f64, minimizer: Vec<f64> },
    /// Non-negative vector with `value = v^T M v` of the violating sign.
    Counterexample { vector: Vec<f64>, value: f64 },
    None,
}

/// Outcome of testing one side: `M` for half positive, `-M` for half
/// negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideVerdict {
    /// `None` when undetermined.
    pub holds: Option<bool>,
    pub method: Method,
    pub certificate: Certificate,
}

impl SideVerdict {
    /// The violating vector and its value `v^T M v`, if the side fails.
    pub fn counterexample(&self) -> Option<(&[f64], f64)> {
        match &self.certificate {
            Certificate::Counterexample { vector, value } => Some((vector.as_slice(), *value)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfDefiniteness {
    pub class: Definiteness,
    pub positive: SideVerdict,
    pub negative: SideVerdict,
    /// Set when `M` itself is not zero but its symmetric part is.
    pub symmetric_part_zero_only: bool,
}

impl HalfDefiniteness {
    /// The side verdict that decided the class.
    pub fn deciding(&self) -> &SideVerdict {
        match self.class {
            Definiteness::HalfNegSemiDef => &self.negative,
            _ => &self.positive,
        }
    }

    pub fn method(&self) -> Method {
        self.deciding().method
    }

    pub fn certificate(&self) -> &Certificate {
        &self.deciding().certificate
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub eps: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            eps: DEFAULT_EPS,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

/// Classify `M` as half positive / negative semi-definite, zero, or neither.
pub fn classify_half_definite(
    m: &DMatrix<f64>,
    opts: &ClassifyOptions,
) -> Result<HalfDefiniteness, CopositivityError> {
    check_square(m)?;
    let eps = opts.eps * scale_of(m);
    let s = symmetric_part(m);

    let zero_side = || SideVerdict {
        holds: Some(true),
        method: Method::ZeroCheck,
        certificate: Certificate::ZeroForm,
    };
    let m_zero = m.iter().all(|v| v.abs() <= eps);
    if m_zero || s.iter().all(|v| v.abs() <= eps) {
        return Ok(HalfDefiniteness {
            class: Definiteness::ZeroMatrix,
            positive: zero_side(),
            negative: zero_side(),
            symmetric_part_zero_only: !m_zero,
        });
    }

    let positive = decide_side(&s, 1.0, eps, opts);
    let negative = decide_side(&(-&s), -1.0, eps, opts);
    let class = match (positive.holds, negative.holds) {
        (Some(true), Some(true)) => Definiteness::ZeroMatrix,
        (Some(true), _) => Definiteness::HalfPosSemiDef,
        (_, Some(true)) => Definiteness::HalfNegSemiDef,
        (Some(false), Some(false)) => Definiteness::Neither,
        _ => Definiteness::Undetermined,
    };
    Ok(HalfDefiniteness {
        class,
        positive,
        negative,
        symmetric_part_zero_only: false,
    })
}

/// Test `x^T s x >= 0` on the non-negative orthant. `orientation` maps the
/// side's values back to the original matrix in counterexamples.
fn decide_side(s: &DMatrix<f64>, orientation: f64, eps: f64, opts: &ClassifyOptions) -> SideVerdict {
    let n = s.nrows();
    let fails = |vector: Vec<f64>, value: f64, method| SideVerdict {
        holds: Some(false),
        method,
        certificate: Certificate::Counterexample {
            vector,
            value: orientation * value,
        },
    };
    let holds = |certificate, method| SideVerdict {
        holds: Some(true),
        method,
        certificate,
    };

    if let Some(i) = (0..n)
        .filter(|&i| s[(i, i)] < -eps)
        .min_by(|&i, &j| s[(i, i)].total_cmp(&s[(j, j)]))
    {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        return fails(e, s[(i, i)], Method::DiagonalScreen);
    }

    if nonnegative_form_check(s, eps) {
        let d = Decomposition {
            psd: DMatrix::zeros(n, n),
            nonneg: s.clone(),
        };
        return holds(Certificate::Decomposition(d), Method::NonnegativeForm);
    }
    if psd_check(s, opts.eps).unwrap_or(false) {
        let d = Decomposition {
            psd: s.clone(),
            nonneg: DMatrix::zeros(n, n),
        };
        return holds(Certificate::Decomposition(d), Method::Eigenvalues);
    }
    if let Some(d) = decompose_psd_plus_nonneg(s, opts.eps) {
        return holds(Certificate::Decomposition(d), Method::Decomposition);
    }

    if n <= EXACT_DIMENSION_LIMIT {
        let min = simplex_min_exact(s, eps).expect("dimension checked");
        return if min.value >= -eps {
            holds(
                Certificate::SimplexMinimum {
                    value: min.value,
                    minimizer: min.minimizer,
                },
                Method::ExactSimplex,
            )
        } else {
            fails(min.minimizer, min.value, Method::ExactSimplex)
        };
    }

    let (x, value) = sample_minimum(s, opts.samples, opts.seed);
    if value < -eps {
        fails(x, value, Method::Sampling)
    } else {
        SideVerdict {
            holds: None,
            method: Method::Sampling,
            certificate: Certificate::None,
        }
    }
}

fn rows<S: Serializer>(m: &DMatrix<f64>, ser: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(ser)
}
