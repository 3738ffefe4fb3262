//! Distribution-robust product synergy.
//!
//! For causes `a`, `b` of a common effect `c` whose remaining parents are
//! grouped into one compound variable `x`, the synergy matrix of a pair
//! `a1 > a2`, `b1 > b2` and an outcome `c0` is
//!
//! ```text
//! D_ij = Pr(c0|a1 b1 x_i) Pr(c0|a2 b2 x_j) - Pr(c0|a2 b1 x_i) Pr(c0|a1 b2 x_j)
//! ```
//!
//! After observing `c0`, the sign of the intercausal influence of `b` on `a`
//! at prior `p` over `x` is the sign of `p^T D p`. The synergy is negative
//! for every prior exactly when every `D` is half negative semi-definite.

mod indirect;
mod noisy_or;

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::copositivity::{
    classify_half_definite, quadratic_form, ClassifyOptions, CopositivityError, Definiteness, HalfDefiniteness,
};
use crate::model::{compound_parents, CompoundCpt, ModelError, Network, VarId};
use crate::oracle::{self, Evidence, OracleError};
use crate::sign::Sign;

pub use indirect::{
    indirect_prediction, indirect_setup, indirect_sign_predict, lambda_form, second_zero, IndirectPrediction,
    IndirectRule, IndirectSetup, LambdaForm, SecondZero,
};
pub use noisy_or::noisy_or_d_closed_form;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynergyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Copositivity(#[from] CopositivityError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid outcome pair ({0}, {1}) for `{2}`: need higher < lower index within range")]
    InvalidPair(usize, usize, String),
    #[error("precondition refused: {0}")]
    Dependent(String),
    #[error("`{0}` must be binary")]
    NotBinary(String),
    #[error("likelihood ratio must be finite and non-negative, got {0}")]
    InvalidLambda(f64),
    #[error("invalid prior over the compound variable: {0}")]
    InvalidPrior(String),
    #[error("parameter {0} is outside [0, 1]")]
    ParameterRange(f64),
}

/// Synergy matrix for one `(a-pair, b-pair, outcome)` triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynergyMatrix {
    pub child: VarId,
    pub a: VarId,
    pub b: VarId,
    pub a_pair: (usize, usize),
    pub b_pair: (usize, usize),
    pub outcome: usize,
    #[serde(serialize_with = "matrix_rows")]
    pub entries: DMatrix<f64>,
    /// Variables grouped into the compound `x`.
    pub x_members: Vec<VarId>,
    /// One label per compound outcome.
    pub x_labels: Vec<String>,
}

impl SynergyMatrix {
    /// `p^T D p`.
    pub fn form(&self, prior: &[f64]) -> f64 {
        quadratic_form(&self.entries, prior)
    }
}

fn matrix_rows<S: Serializer>(m: &DMatrix<f64>, ser: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(ser)
}

fn check_pair(net: &Network, var: VarId, pair: (usize, usize)) -> Result<(), SynergyError> {
    if pair.0 < pair.1 && pair.1 < net.card(var) {
        Ok(())
    } else {
        Err(SynergyError::InvalidPair(pair.0, pair.1, net.name(var).to_string()))
    }
}

pub(crate) fn matrix_from_compound(
    cc: &CompoundCpt,
    outcome: usize,
    a_pair: (usize, usize),
    b_pair: (usize, usize),
) -> DMatrix<f64> {
    let n = cc.compound.card();
    let p = |a, b, x| cc.prob(a, b, x, outcome);
    let ((a1, a2), (b1, b2)) = (a_pair, b_pair);
    DMatrix::from_fn(n, n, |i, j| p(a1, b1, i) * p(a2, b2, j) - p(a2, b1, i) * p(a1, b2, j))
}

/// Synergy matrix of `pair` on `child` for one pair of outcomes of each
/// cause. Pairs are `(higher, lower)` outcome indices.
pub fn build_d(
    net: &Network,
    child: VarId,
    pair: (VarId, VarId),
    outcome: usize,
    a_pair: (usize, usize),
    b_pair: (usize, usize),
) -> Result<SynergyMatrix, SynergyError> {
    let cc = compound_parents(net, child, pair)?;
    crate::qual::check_outcome(net, child, outcome)?;
    check_pair(net, pair.0, a_pair)?;
    check_pair(net, pair.1, b_pair)?;
    Ok(SynergyMatrix {
        child,
        a: pair.0,
        b: pair.1,
        a_pair,
        b_pair,
        outcome,
        entries: matrix_from_compound(&cc, outcome, a_pair, b_pair),
        x_members: cc.compound.members.clone(),
        x_labels: cc.compound.labels.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVerdict {
    pub matrix: SynergyMatrix,
    pub classification: HalfDefiniteness,
    pub sign: Sign,
}

/// A prior over the compound variable at which `p^T D p` has the sign of
/// `value` for the given outcome pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub a_pair: (usize, usize),
    pub b_pair: (usize, usize),
    pub prior: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynergyVerdict {
    pub per_pair: Vec<PairVerdict>,
    pub overall: Sign,
    /// For an ambiguous verdict: the strongest prior found in each direction.
    pub witnesses: Vec<Witness>,
    /// Some matrix exceeded the exact-test dimension and could not be settled.
    pub undetermined: bool,
}

impl SynergyVerdict {
    pub fn witness(&self, direction: Sign) -> Option<&Witness> {
        self.witnesses.iter().find(|w| Sign::of(w.value, 0.0) == direction)
    }
}

fn pair_sign(class: Definiteness) -> Sign {
    match class {
        Definiteness::HalfPosSemiDef => Sign::Positive,
        Definiteness::HalfNegSemiDef => Sign::Negative,
        Definiteness::ZeroMatrix => Sign::Zero,
        Definiteness::Neither | Definiteness::Undetermined => Sign::Ambiguous,
    }
}

/// Product synergy of `pair` for outcome `outcome` of `child`, robust to the
/// distribution of the remaining parents: every outcome pair of both causes
/// is classified and the verdicts combined.
pub fn product_synergy_2(
    net: &Network,
    child: VarId,
    pair: (VarId, VarId),
    outcome: usize,
    opts: &ClassifyOptions,
) -> Result<SynergyVerdict, SynergyError> {
    let cc = compound_parents(net, child, pair)?;
    crate::qual::check_outcome(net, child, outcome)?;
    let (na, nb) = cc.keep_cards;

    let mut per_pair = Vec::new();
    for a1 in 0..na {
        for a2 in a1 + 1..na {
            for b1 in 0..nb {
                for b2 in b1 + 1..nb {
                    let entries = matrix_from_compound(&cc, outcome, (a1, a2), (b1, b2));
                    let classification = classify_half_definite(&entries, opts)?;
                    let sign = pair_sign(classification.class);
                    per_pair.push(PairVerdict {
                        matrix: SynergyMatrix {
                            child,
                            a: pair.0,
                            b: pair.1,
                            a_pair: (a1, a2),
                            b_pair: (b1, b2),
                            outcome,
                            entries,
                            x_members: cc.compound.members.clone(),
                            x_labels: cc.compound.labels.clone(),
                        },
                        classification,
                        sign,
                    });
                }
            }
        }
    }

    let overall = Sign::join(per_pair.iter().map(|p| p.sign));
    let undetermined = per_pair
        .iter()
        .any(|p| p.classification.class == Definiteness::Undetermined);
    let witnesses = if overall == Sign::Ambiguous {
        collect_witnesses(&per_pair)
    } else {
        Vec::new()
    };
    Ok(SynergyVerdict {
        per_pair,
        overall,
        witnesses,
        undetermined,
    })
}

fn collect_witnesses(per_pair: &[PairVerdict]) -> Vec<Witness> {
    let mut best_pos: Option<Witness> = None;
    let mut best_neg: Option<Witness> = None;
    for pv in per_pair {
        let sides = [&pv.classification.positive, &pv.classification.negative];
        for (vector, _) in sides.iter().filter_map(|s| s.counterexample()) {
            let total: f64 = vector.iter().sum();
            let prior: Vec<f64> = vector.iter().map(|v| v / total).collect();
            let value = pv.matrix.form(&prior);
            let slot = if value > 0.0 { &mut best_pos } else { &mut best_neg };
            if slot.as_ref().is_none_or(|w| value.abs() > w.value.abs()) {
                *slot = Some(Witness {
                    a_pair: pv.matrix.a_pair,
                    b_pair: pv.matrix.b_pair,
                    prior,
                    value,
                });
            }
        }
    }
    best_pos.into_iter().chain(best_neg).collect()
}

/// Refuse pairs for which the observed-effect result does not apply: `a`,
/// `b` and the remaining parents of `child` must have pairwise disjoint
/// ancestral sets (no edge between them and no shared ancestor).
pub fn check_independent_causes(net: &Network, child: VarId, pair: (VarId, VarId)) -> Result<(), SynergyError> {
    let (a, b) = pair;
    let cpt = net.cpt(child);
    for v in [a, b] {
        if cpt.position_of(v).is_none() {
            return Err(ModelError::NotAParent {
                parent: net.name(v).to_string(),
                child: net.name(child).to_string(),
            }
            .into());
        }
    }
    if a == b {
        return Err(SynergyError::Dependent("the pair names one variable twice".into()));
    }
    let anc_a = net.ancestral_set(a);
    let anc_b = net.ancestral_set(b);
    if let Some(shared) = anc_a.intersection(&anc_b).next() {
        return Err(SynergyError::Dependent(format!(
            "`{}` and `{}` are dependent through `{}`",
            net.name(a),
            net.name(b),
            net.name(*shared)
        )));
    }
    let causes: BTreeSet<VarId> = anc_a.union(&anc_b).copied().collect();
    for &other in cpt.parents().iter().filter(|&&p| p != a && p != b) {
        if let Some(shared) = net.ancestral_set(other).intersection(&causes).next() {
            return Err(SynergyError::Dependent(format!(
                "remaining parent `{}` depends on the pair through `{}`",
                net.name(other),
                net.name(*shared)
            )));
        }
    }
    Ok(())
}

/// Product-synergy verdict for intercausal reasoning after observing
/// `outcome` of `child`, after checking the independence precondition. Its
/// `overall` sign is the sign of the influence of `b` on `a` for every prior
/// over the other parents.
pub fn observed_intercausal_verdict(
    net: &Network,
    pair: (VarId, VarId),
    child: VarId,
    outcome: usize,
    opts: &ClassifyOptions,
) -> Result<SynergyVerdict, SynergyError> {
    check_independent_causes(net, child, pair)?;
    product_synergy_2(net, child, pair, outcome, opts)
}

pub fn intercausal_sign_observed(
    net: &Network,
    pair: (VarId, VarId),
    child: VarId,
    outcome: usize,
    opts: &ClassifyOptions,
) -> Result<Sign, SynergyError> {
    Ok(observed_intercausal_verdict(net, pair, child, outcome, opts)?.overall)
}

/// The network's own distribution over the compound variable of `child`
/// with respect to `pair`.
pub fn compound_prior(net: &Network, child: VarId, pair: (VarId, VarId)) -> Result<Vec<f64>, SynergyError> {
    let cc = compound_parents(net, child, pair)?;
    if cc.compound.members.is_empty() {
        return Ok(vec![1.0]);
    }
    Ok(oracle::joint_marginal(net, &cc.compound.members, &Evidence::new())?)
}

pub(crate) fn check_prior(prior: &[f64], n: usize) -> Result<(), SynergyError> {
    if prior.len() != n {
        return Err(SynergyError::InvalidPrior(format!(
            "expected {n} entries, got {}",
            prior.len()
        )));
    }
    if prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(SynergyError::InvalidPrior("entries must be non-negative".into()));
    }
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(SynergyError::InvalidPrior(format!("entries sum to {total}")));
    }
    Ok(())
}
