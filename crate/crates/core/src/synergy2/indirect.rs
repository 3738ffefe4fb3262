//! Intercausal reasoning when the common effect is only indirectly observed.
//!
//! Evidence on a child `d` of a binary effect `c` reaches `c` through the
//! likelihood ratio `lambda = Pr(d|C) / Pr(d|~C)`. Up to a positive factor,
//! the influence of `b` on `a` is then
//!
//! ```text
//! E(lambda) = (lambda - 1)(lambda q_C - q_~C) = (lambda - 1)((lambda - 1) q_C + y)
//! ```
//!
//! with `q_o = p^T D_o p` and `y` the additive synergy averaged over `p`.

use serde::Serialize;

use super::{build_d, check_prior, product_synergy_2, SynergyError};
use crate::copositivity::ClassifyOptions;
use crate::model::{compound_parents, Network, VarId};
use crate::qual;
use crate::sign::Sign;

/// The quadratic forms behind `E(lambda)` at one prior and one ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaForm {
    pub lambda: f64,
    /// `p^T D_C p`.
    pub q_c: f64,
    /// `p^T D_~C p`.
    pub q_not_c: f64,
    /// `sum_m p_m [P(C|a1 b1 x_m) + P(C|a2 b2 x_m) - P(C|a1 b2 x_m) - P(C|a2 b1 x_m)]`.
    pub additive: f64,
    /// `(lambda - 1)(lambda q_C - q_~C)`.
    pub value: f64,
    /// `(lambda - 1)((lambda - 1) q_C + y)`; equal to `value` up to rounding.
    pub additive_value: f64,
}

fn require_binary(net: &Network, v: VarId) -> Result<(), SynergyError> {
    if net.card(v) == 2 {
        Ok(())
    } else {
        Err(SynergyError::NotBinary(net.name(v).to_string()))
    }
}

/// Evaluate `E(lambda)` for a binary `child` at prior `x_prior` over the
/// compound of its other parents.
pub fn lambda_form(
    net: &Network,
    child: VarId,
    pair: (VarId, VarId),
    a_pair: (usize, usize),
    b_pair: (usize, usize),
    x_prior: &[f64],
    lambda: f64,
) -> Result<LambdaForm, SynergyError> {
    require_binary(net, child)?;
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(SynergyError::InvalidLambda(lambda));
    }
    let d_c = build_d(net, child, pair, 0, a_pair, b_pair)?;
    check_prior(x_prior, d_c.entries.nrows())?;
    let d_not_c = build_d(net, child, pair, 1, a_pair, b_pair)?;
    let cc = compound_parents(net, child, pair)?;

    let ((a1, a2), (b1, b2)) = (a_pair, b_pair);
    let additive: f64 = x_prior
        .iter()
        .enumerate()
        .map(|(m, pm)| {
            let p = |a, b| cc.prob(a, b, m, 0);
            pm * (p(a1, b1) + p(a2, b2) - p(a1, b2) - p(a2, b1))
        })
        .sum();
    let q_c = d_c.form(x_prior);
    let q_not_c = d_not_c.form(x_prior);
    Ok(LambdaForm {
        lambda,
        q_c,
        q_not_c,
        additive,
        value: (lambda - 1.0) * (lambda * q_c - q_not_c),
        additive_value: (lambda - 1.0) * ((lambda - 1.0) * q_c + additive),
    })
}

/// Zero of `E(lambda)` other than `lambda = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "lambda", rename_all = "snake_case")]
pub enum SecondZero {
    /// `lambda* = q_~C / q_C >= 0`: the sign flips there.
    InRange(f64),
    /// `lambda* < 0`: no second sign change for admissible evidence.
    OutOfRange(f64),
    /// `q_C = 0`: `E` is linear in `lambda` and vanishes only at 1 (or
    /// everywhere, when `q_~C = 0` too).
    Degenerate,
}

impl SecondZero {
    pub fn from_forms(q_c: f64, q_not_c: f64, eps: f64) -> SecondZero {
        if q_c.abs() <= eps {
            return SecondZero::Degenerate;
        }
        // adding zero turns -0.0 into 0.0
        let root = q_not_c / q_c + 0.0;
        if root >= 0.0 {
            SecondZero::InRange(root)
        } else {
            SecondZero::OutOfRange(root)
        }
    }
}

pub fn second_zero(
    net: &Network,
    child: VarId,
    pair: (VarId, VarId),
    a_pair: (usize, usize),
    b_pair: (usize, usize),
    x_prior: &[f64],
    eps: f64,
) -> Result<SecondZero, SynergyError> {
    let f = lambda_form(net, child, pair, a_pair, b_pair, x_prior, 1.0)?;
    Ok(SecondZero::from_forms(f.q_c, f.q_not_c, eps))
}

/// Qualitative inputs for indirect evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndirectSetup {
    /// Distribution-robust product synergy for `C`.
    pub delta1: Sign,
    /// Distribution-robust product synergy for `~C`.
    pub delta2: Sign,
    /// Additive synergy on `c`.
    pub delta3: Sign,
    /// Influence of `c` on the observed `d`.
    pub delta4: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndirectRule {
    /// `d` carries no information about `c`.
    Uninformative,
    /// Positive evidence and matching product/additive synergies for `C`.
    PositiveEvidence,
    /// Negative evidence and differing product synergy for `~C` and additive synergy.
    NegativeEvidence,
    /// Opposite definite product synergies for `C` and `~C`.
    OppositeProductSynergies,
    /// Settled by the sign algebra on one of the three forms of `E`.
    SignAlgebra,
    /// Nothing can be concluded.
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndirectPrediction {
    pub sign: Sign,
    pub rule: IndirectRule,
}

/// Predicted sign of the intercausal influence under indirect evidence.
///
/// `E` can be written three ways, each a combination of two signed terms
/// with coefficients of fixed sign on each side of `lambda = 1`:
/// `lambda q_C - q_~C`, `(lambda - 1) q_C + y` and `(lambda - 1) q_~C +
/// lambda y`. Any of them whose sign is determined gives the answer.
pub fn indirect_prediction(setup: &IndirectSetup) -> IndirectPrediction {
    let IndirectSetup {
        delta1: d1,
        delta2: d2,
        delta3: d3,
        delta4: d4,
    } = *setup;
    let unresolved = IndirectPrediction {
        sign: Sign::Ambiguous,
        rule: IndirectRule::Unresolved,
    };
    if d4 == Sign::Zero {
        return IndirectPrediction {
            sign: Sign::Zero,
            rule: IndirectRule::Uninformative,
        };
    }
    if [d1, d2, d3, d4].contains(&Sign::Ambiguous) {
        return unresolved;
    }
    let candidates = if d4 == Sign::Positive {
        // lambda > 1
        [d1 + -d2, d1 + d3, d2 + d3]
    } else {
        // 0 <= lambda < 1, overall factor (lambda - 1) < 0
        [-d1 + d2, d1 + -d3, d2 + -d3]
    };
    let mut definite = candidates.iter().copied().filter(|s| *s != Sign::Ambiguous);
    let Some(sign) = definite.next() else {
        return unresolved;
    };
    if definite.any(|s| s != sign) {
        // the inputs contradict each other
        return unresolved;
    }
    let opposite = d1.is_definite() && d1 != Sign::Zero && d2 == -d1;
    let rule = if d4 == Sign::Positive && d1 == d3 {
        IndirectRule::PositiveEvidence
    } else if d4 == Sign::Negative && d2 != d3 && sign == d2 {
        IndirectRule::NegativeEvidence
    } else if opposite {
        IndirectRule::OppositeProductSynergies
    } else {
        IndirectRule::SignAlgebra
    };
    IndirectPrediction { sign, rule }
}

pub fn indirect_sign_predict(setup: &IndirectSetup) -> Sign {
    indirect_prediction(setup).sign
}

/// Derive the four signs for `pair` -> `child` -> `observed` from the network.
pub fn indirect_setup(
    net: &Network,
    child: VarId,
    pair: (VarId, VarId),
    observed: VarId,
    opts: &ClassifyOptions,
) -> Result<IndirectSetup, SynergyError> {
    require_binary(net, child)?;
    Ok(IndirectSetup {
        delta1: product_synergy_2(net, child, pair, 0, opts)?.overall,
        delta2: product_synergy_2(net, child, pair, 1, opts)?.overall,
        delta3: qual::additive_synergy(net, pair, child, opts.eps)?.sign,
        delta4: qual::qualitative_influence(net, child, observed, opts.eps)?.sign,
    })
}
