//! Classical qualitative properties read directly off a child's table:
//! qualitative influence, additive synergy and per-instantiation product
//! synergy.
//!
//! Each property is a family of weak inequalities quantified over all
//! ordered outcome pairs of the causes, all thresholds of the effect and all
//! joint instantiations of the remaining parents. An instance with
//! `|lhs - rhs| <= eps` is an equality and is compatible with either
//! direction.

use serde::Serialize;

use crate::model::{compound_parents, CompoundCpt, ModelError, Network, VarId};
use crate::sign::Sign;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// One inequality instance. `difference` is `lhs - rhs` oriented so that a
/// positive value supports the positive sign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    /// `(higher, lower)` outcome indices of the first cause.
    pub a_pair: (usize, usize),
    /// `(higher, lower)` outcome indices of the second cause, for synergies.
    pub b_pair: Option<(usize, usize)>,
    /// Assignment of every other parent of the effect.
    pub context: Vec<(VarId, usize)>,
    /// Threshold index `t` of `effect >= e_t`, or the outcome for product
    /// synergy.
    pub threshold: usize,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignWitness {
    pub sign: Sign,
    /// Most extreme instance in the positive direction, if any exceeded `eps`.
    pub positive: Option<Instance>,
    /// Most extreme instance in the negative direction.
    pub negative: Option<Instance>,
}

impl SignWitness {
    /// An instance refuting `claim`, or `None` when the claim holds.
    pub fn counterexample_to(&self, claim: Sign) -> Option<&Instance> {
        match claim {
            Sign::Positive => self.negative.as_ref(),
            Sign::Negative => self.positive.as_ref(),
            Sign::Zero => self.positive.as_ref().or(self.negative.as_ref()),
            Sign::Ambiguous => None,
        }
    }
}

struct Tally {
    eps: f64,
    positive: Option<Instance>,
    negative: Option<Instance>,
}

impl Tally {
    fn new(eps: f64) -> Self {
        Tally {
            eps,
            positive: None,
            negative: None,
        }
    }

    fn push(&mut self, difference: f64, instance: impl FnOnce() -> Instance) {
        let slot = if difference > self.eps {
            &mut self.positive
        } else if difference < -self.eps {
            &mut self.negative
        } else {
            return;
        };
        if slot.as_ref().is_none_or(|i| difference.abs() > i.difference.abs()) {
            *slot = Some(Instance {
                difference,
                ..instance()
            });
        }
    }

    fn finish(self) -> SignWitness {
        let sign = match (&self.positive, &self.negative) {
            (None, None) => Sign::Zero,
            (Some(_), None) => Sign::Positive,
            (None, Some(_)) => Sign::Negative,
            (Some(_), Some(_)) => Sign::Ambiguous,
        };
        SignWitness {
            sign,
            positive: self.positive,
            negative: self.negative,
        }
    }
}

fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |hi| (hi + 1..n).map(move |lo| (hi, lo)))
}

fn context(cc: &CompoundCpt, x: usize) -> Vec<(VarId, usize)> {
    cc.compound
        .members
        .iter()
        .copied()
        .zip(cc.compound.outcomes[x].iter().copied())
        .collect()
}

/// Sign of the influence of `cause` on `effect`: whether raising the cause
/// makes higher values of the effect more probable, for every instantiation
/// of the other parents.
pub fn qualitative_influence(
    net: &Network,
    cause: VarId,
    effect: VarId,
    eps: f64,
) -> Result<SignWitness, ModelError> {
    let cpt = net.cpt(effect);
    let pos = cpt.position_of(cause).ok_or_else(|| ModelError::NotAParent {
        parent: net.name(cause).to_string(),
        child: net.name(effect).to_string(),
    })?;
    let na = net.card(cause);
    let nc = cpt.child_card();
    let mut tally = Tally::new(eps);

    let others: Vec<VarId> = cpt.parents().iter().copied().filter(|&p| p != cause).collect();
    for values in cpt.parent_assignments().filter(|v| v[pos] == 0) {
        let tail = |a: usize, t: usize| {
            let mut full = values.clone();
            full[pos] = a;
            cpt.row(&full)[..=t].iter().sum::<f64>()
        };
        for (hi, lo) in ordered_pairs(na) {
            for t in 0..nc - 1 {
                let diff = tail(hi, t) - tail(lo, t);
                tally.push(diff, || Instance {
                    a_pair: (hi, lo),
                    b_pair: None,
                    context: others
                        .iter()
                        .map(|&o| (o, values[cpt.position_of(o).unwrap()]))
                        .collect(),
                    threshold: t,
                    difference: 0.0,
                });
            }
        }
    }
    Ok(tally.finish())
}

/// Sign of the additive synergy of `pair` on `effect`.
pub fn additive_synergy(
    net: &Network,
    pair: (VarId, VarId),
    effect: VarId,
    eps: f64,
) -> Result<SignWitness, ModelError> {
    let cc = compound_parents(net, effect, pair)?;
    let (na, nb) = cc.keep_cards;
    let mut tally = Tally::new(eps);
    for x in 0..cc.compound.card() {
        for a in ordered_pairs(na) {
            for b in ordered_pairs(nb) {
                for t in 0..cc.child_card - 1 {
                    let diff = cc.tail(a.0, b.0, x, t) + cc.tail(a.1, b.1, x, t)
                        - cc.tail(a.0, b.1, x, t)
                        - cc.tail(a.1, b.0, x, t);
                    tally.push(diff, || Instance {
                        a_pair: a,
                        b_pair: Some(b),
                        context: context(&cc, x),
                        threshold: t,
                        difference: 0.0,
                    });
                }
            }
        }
    }
    Ok(tally.finish())
}

/// Per-instantiation product synergy of `pair` for one outcome of `effect`:
/// the sign of `Pr(o|a1 b1 x) Pr(o|a2 b2 x) - Pr(o|a1 b2 x) Pr(o|a2 b1 x)`.
pub fn product_synergy_1(
    net: &Network,
    pair: (VarId, VarId),
    effect: VarId,
    outcome: usize,
    eps: f64,
) -> Result<SignWitness, ModelError> {
    let cc = compound_parents(net, effect, pair)?;
    check_outcome(net, effect, outcome)?;
    let (na, nb) = cc.keep_cards;
    let mut tally = Tally::new(eps);
    for x in 0..cc.compound.card() {
        for a in ordered_pairs(na) {
            for b in ordered_pairs(nb) {
                let p = |ai, bi| cc.prob(ai, bi, x, outcome);
                let diff = p(a.0, b.0) * p(a.1, b.1) - p(a.0, b.1) * p(a.1, b.0);
                tally.push(diff, || Instance {
                    a_pair: a,
                    b_pair: Some(b),
                    context: context(&cc, x),
                    threshold: outcome,
                    difference: 0.0,
                });
            }
        }
    }
    Ok(tally.finish())
}

pub(crate) fn check_outcome(net: &Network, var: VarId, outcome: usize) -> Result<(), ModelError> {
    if outcome >= net.card(var) {
        return Err(ModelError::UnknownOutcome {
            variable: net.name(var).to_string(),
            outcome: outcome.to_string(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::model::parse_network;

    const EPS: f64 = DEFAULT_TOLERANCE;

    fn sign_flip() -> (Network, [VarId; 4]) {
        let net = parse_network(bundled::SIGN_FLIP).unwrap();
        let ids = ["a", "b", "x", "c"].map(|n| net.require(n).unwrap());
        (net, ids)
    }

    fn two_cause(rows: [f64; 4]) -> (Network, VarId, VarId, VarId) {
        let mut b = Network::builder();
        let a = b.binary("a");
        let bb = b.binary("b");
        let c = b.binary("c");
        b.prior(a, vec![0.5, 0.5]).prior(bb, vec![0.5, 0.5]);
        b.table(c, &[a, bb], rows.iter().map(|&p| vec![p, 1.0 - p]).collect());
        (b.build().unwrap(), a, bb, c)
    }

    #[test]
    fn sign_flip_influences_are_positive() {
        let (net, [a, b, x, c]) = sign_flip();
        for cause in [a, b, x] {
            let w = qualitative_influence(&net, cause, c, EPS).unwrap();
            assert_eq!(w.sign, Sign::Positive, "{}", net.name(cause));
            assert!(w.counterexample_to(Sign::Positive).is_none());
        }
    }

    #[test]
    fn sign_flip_product_synergies_are_negative() {
        let (net, [a, b, x, c]) = sign_flip();
        for pair in [(a, b), (a, x), (b, x)] {
            let w = product_synergy_1(&net, pair, c, 0, EPS).unwrap();
            assert_eq!(w.sign, Sign::Negative);
        }
    }

    #[test]
    fn sign_flip_additive_synergy_is_ambiguous() {
        let (net, [a, b, x, c]) = sign_flip();
        let w = additive_synergy(&net, (a, b), c, EPS).unwrap();
        assert_eq!(w.sign, Sign::Ambiguous);
        // at X: 0.99 + 0.6 - 0.8 - 0.8 = -0.01; at ~X: 0.99 + 0.0 - 0.2 - 0.2 = 0.59
        let neg = w.negative.unwrap();
        assert_eq!(neg.context, vec![(x, 0)]);
        assert!((neg.difference + 0.01).abs() < 1e-12);
        let pos = w.positive.unwrap();
        assert_eq!(pos.context, vec![(x, 1)]);
        assert!((pos.difference - 0.59).abs() < 1e-12);
    }

    #[test]
    fn constant_in_cause_is_zero() {
        let (net, a, _, c) = two_cause([0.7, 0.4, 0.7, 0.4]);
        assert_eq!(qualitative_influence(&net, a, c, EPS).unwrap().sign, Sign::Zero);
    }

    #[test]
    fn additive_model_has_zero_additive_synergy() {
        // f(a) + g(b): 0.1 + {0.5, 0.2} + {0.3, 0.0}
        let (net, a, b, c) = two_cause([0.9, 0.6, 0.7, 0.4]);
        assert_eq!(additive_synergy(&net, (a, b), c, EPS).unwrap().sign, Sign::Zero);
    }

    #[test]
    fn noisy_or_two_cause_is_subadditive() {
        let (p, q) = (0.6, 0.3);
        let both = 1.0 - (1.0 - p) * (1.0 - q);
        let (net, a, b, c) = two_cause([both, p, q, 0.0]);
        let w = additive_synergy(&net, (a, b), c, EPS).unwrap();
        assert_eq!(w.sign, Sign::Negative);
        assert!((w.negative.unwrap().difference + p * q).abs() < 1e-12);
    }

    #[test]
    fn deterministic_or_absent_effect_is_zero() {
        let (net, a, b, c) = two_cause([1.0, 1.0, 1.0, 0.0]);
        assert_eq!(product_synergy_1(&net, (a, b), c, 1, EPS).unwrap().sign, Sign::Zero);
    }

    #[test]
    fn relabeling_the_pair_keeps_the_sign() {
        let (net, [a, b, x, c]) = sign_flip();
        for (p, q) in [(a, b), (a, x), (b, x)] {
            assert_eq!(
                additive_synergy(&net, (p, q), c, EPS).unwrap().sign,
                additive_synergy(&net, (q, p), c, EPS).unwrap().sign
            );
            assert_eq!(
                product_synergy_1(&net, (p, q), c, 0, EPS).unwrap().sign,
                product_synergy_1(&net, (q, p), c, 0, EPS).unwrap().sign
            );
        }
    }

    #[test]
    fn multi_valued_thresholds() {
        let mut bld = Network::builder();
        let a = bld.variable("a", &["hi", "lo"]);
        let c = bld.variable("c", &["high", "mid", "low"]);
        bld.prior(a, vec![0.5, 0.5]);
        // hi shifts mass from low to mid only: tail(t=0) equal, tail(t=1) larger
        bld.table(c, &[a], vec![vec![0.2, 0.5, 0.3], vec![0.2, 0.3, 0.5]]);
        let net = bld.build().unwrap();
        let w = qualitative_influence(&net, a, c, EPS).unwrap();
        assert_eq!(w.sign, Sign::Positive);
        assert_eq!(w.positive.unwrap().threshold, 1);
    }

    #[test]
    fn errors_on_non_parent() {
        let (net, [a, _, _, c]) = sign_flip();
        assert!(qualitative_influence(&net, c, a, EPS).is_err());
        assert!(product_synergy_1(&net, (a, c), c, 0, EPS).is_err());
        let b = net.require("b").unwrap();
        assert!(product_synergy_1(&net, (a, b), c, 2, EPS).is_err());
    }
}
