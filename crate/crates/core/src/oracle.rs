//! Exact inference by summing the full joint distribution.
//!
//! This is ground truth for every qualitative prediction in the crate, not a
//! production inference engine: networks whose joint state space exceeds
//! [`MAX_JOINT_STATES`] are refused.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::model::{ModelError, Network, VarId};
use crate::sign::Sign;

pub const MAX_JOINT_STATES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("evidence has zero probability")]
    ZeroProbabilityEvidence,
    #[error("query variable `{0}` is observed")]
    QueryObserved(String),
    #[error("joint state space of {states} entries exceeds the limit of {MAX_JOINT_STATES}")]
    StateSpaceTooLarge { states: u128 },
    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),
    #[error("`{0}` must be binary")]
    NotBinary(String),
    #[error("`{0}` must be a root variable")]
    NotRoot(String),
    #[error("grid value {0} is out of range")]
    GridValue(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Hard observations plus at most one soft (likelihood) finding.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Evidence {
    hard: BTreeMap<VarId, usize>,
    soft: Option<(VarId, Vec<f64>)>,
}

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(mut self, var: VarId, outcome: usize) -> Self {
        self.hard.insert(var, outcome);
        self
    }

    /// Soft evidence on one variable: a likelihood per outcome. Only ratios
    /// matter for posteriors.
    pub fn likelihood(mut self, var: VarId, weights: Vec<f64>) -> Self {
        self.soft = Some((var, weights));
        self
    }

    /// Binary likelihood-ratio evidence `[lambda, 1]`.
    pub fn lambda(self, var: VarId, lambda: f64) -> Self {
        self.likelihood(var, vec![lambda, 1.0])
    }

    pub fn hard(&self) -> &BTreeMap<VarId, usize> {
        &self.hard
    }

    pub fn soft(&self) -> Option<(VarId, &[f64])> {
        self.soft.as_ref().map(|(v, w)| (*v, w.as_slice()))
    }

    pub fn is_observed(&self, var: VarId) -> bool {
        self.hard.contains_key(&var) || self.soft.as_ref().is_some_and(|(v, _)| *v == var)
    }

    fn validate(&self, net: &Network) -> Result<(), OracleError> {
        for (&var, &outcome) in &self.hard {
            if var.0 >= net.len() || outcome >= net.card(var) {
                return Err(OracleError::InvalidEvidence(format!(
                    "outcome {outcome} of variable {var}"
                )));
            }
        }
        if let Some((var, weights)) = &self.soft {
            if var.0 >= net.len() {
                return Err(OracleError::InvalidEvidence(format!("variable {var}")));
            }
            if self.hard.contains_key(var) {
                return Err(OracleError::InvalidEvidence(format!(
                    "`{}` carries both hard and soft evidence",
                    net.name(*var)
                )));
            }
            if weights.len() != net.card(*var) {
                return Err(OracleError::InvalidEvidence(format!(
                    "likelihood for `{}` needs {} entries",
                    net.name(*var),
                    net.card(*var)
                )));
            }
            if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(OracleError::InvalidEvidence(
                    "likelihood entries must be finite and non-negative".into(),
                ));
            }
            if weights.iter().all(|&w| w == 0.0) {
                return Err(OracleError::InvalidEvidence("likelihood is all zero".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Posterior {
    pub variable: VarId,
    pub probs: Vec<f64>,
}

/// Visit every joint assignment consistent with the hard evidence together
/// with its weight (joint probability times soft likelihood).
fn enumerate<F>(net: &Network, ev: &Evidence, scale_soft: bool, mut visit: F) -> Result<(), OracleError>
where
    F: FnMut(&[usize], f64),
{
    ev.validate(net)?;
    let states: u128 = net.ids().map(|v| net.card(v) as u128).product();
    if states > MAX_JOINT_STATES as u128 {
        return Err(OracleError::StateSpaceTooLarge { states });
    }

    let soft = ev.soft().map(|(var, w)| {
        let max = w.iter().cloned().fold(0.0, f64::max);
        let w: Vec<f64> = if scale_soft { w.iter().map(|x| x / max).collect() } else { w.to_vec() };
        (var, w)
    });

    let free: Vec<VarId> = net.ids().filter(|v| !ev.hard.contains_key(v)).collect();
    let mut values = vec![0usize; net.len()];
    for (&v, &o) in &ev.hard {
        values[v.0] = o;
    }
    let mut parent_values: Vec<usize> = Vec::new();
    let order = net.order();
    let total: usize = free.iter().map(|&v| net.card(v)).product();

    for k in 0..total {
        if k > 0 {
            for &v in free.iter().rev() {
                values[v.0] += 1;
                if values[v.0] < net.card(v) {
                    break;
                }
                values[v.0] = 0;
            }
        }
        let mut weight = 1.0;
        for &v in order {
            let cpt = net.cpt(v);
            parent_values.clear();
            parent_values.extend(cpt.parents().iter().map(|p| values[p.0]));
            weight *= cpt.prob(&parent_values, values[v.0]);
            if weight == 0.0 {
                break;
            }
        }
        if let Some((var, w)) = &soft {
            weight *= w[values[var.0]];
        }
        visit(&values, weight);
    }
    Ok(())
}

/// Total weight of the evidence with the soft likelihood taken as given
/// (unnormalized). For hard evidence alone this is `Pr(evidence)`.
pub fn evidence_weight(net: &Network, ev: &Evidence) -> Result<f64, OracleError> {
    let mut total = 0.0;
    enumerate(net, ev, false, |_, w| total += w)?;
    Ok(total)
}

/// Joint posterior over `vars`, flattened lexicographically (first variable
/// most significant).
pub fn joint_marginal(net: &Network, vars: &[VarId], ev: &Evidence) -> Result<Vec<f64>, OracleError> {
    let cards: Vec<usize> = vars.iter().map(|&v| net.card(v)).collect();
    let mut probs = vec![0.0; cards.iter().product()];
    enumerate(net, ev, true, |values, w| {
        let idx = vars
            .iter()
            .zip(&cards)
            .fold(0, |acc, (v, &card)| acc * card + values[v.0]);
        probs[idx] += w;
    })?;
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(OracleError::ZeroProbabilityEvidence);
    }
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

/// Exact conditional distribution of `query` given `ev`.
pub fn posterior(net: &Network, query: VarId, ev: &Evidence) -> Result<Posterior, OracleError> {
    if ev.hard.contains_key(&query) {
        return Err(OracleError::QueryObserved(net.name(query).to_string()));
    }
    let probs = joint_marginal(net, &[query], ev)?;
    Ok(Posterior {
        variable: query,
        probs,
    })
}

/// For each threshold `t` in `0..n_a - 1`, the change in
/// `Pr(a >= a_t | b, ev)` when `b` moves from `b_pair.1` up to `b_pair.0`.
pub fn posterior_shift(
    net: &Network,
    a: VarId,
    b: VarId,
    b_pair: (usize, usize),
    ev: &Evidence,
) -> Result<Vec<f64>, OracleError> {
    if ev.is_observed(a) {
        return Err(OracleError::QueryObserved(net.name(a).to_string()));
    }
    if ev.is_observed(b) {
        return Err(OracleError::InvalidEvidence(format!("`{}` is already observed", net.name(b))));
    }
    let hi = posterior(net, a, &ev.clone().observe(b, b_pair.0))?;
    let lo = posterior(net, a, &ev.clone().observe(b, b_pair.1))?;
    let mut shifts = Vec::with_capacity(net.card(a) - 1);
    let (mut cum_hi, mut cum_lo) = (0.0, 0.0);
    for t in 0..net.card(a) - 1 {
        cum_hi += hi.probs[t];
        cum_lo += lo.probs[t];
        shifts.push(cum_hi - cum_lo);
    }
    Ok(shifts)
}

/// Scalar intercausal influence for binary `a` and `b`:
/// `Pr(A | B, ev) - Pr(A | ~B, ev)`.
pub fn intercausal_influence(net: &Network, a: VarId, b: VarId, ev: &Evidence) -> Result<f64, OracleError> {
    for v in [a, b] {
        if !net.variable(v).is_binary() {
            return Err(OracleError::NotBinary(net.name(v).to_string()));
        }
    }
    Ok(posterior_shift(net, a, b, (0, 1), ev)?[0])
}

/// Sign of the qualitative influence of `b` on `a` given `ev`, checked on the
/// posterior family for every pair of `b` outcomes and every threshold of `a`.
pub fn intercausal_dominance(
    net: &Network,
    a: VarId,
    b: VarId,
    ev: &Evidence,
    eps: f64,
) -> Result<Sign, OracleError> {
    let nb = net.card(b);
    let mut signs = Vec::new();
    for hi in 0..nb {
        for lo in hi + 1..nb {
            let shifts = posterior_shift(net, a, b, (hi, lo), ev)?;
            signs.extend(shifts.into_iter().map(|d| Sign::of(d, eps)));
        }
    }
    Ok(Sign::join(signs))
}

/// Intercausal influence as a function of a binary root's prior `Pr(root = true)`.
pub fn sweep_prior(
    net: &Network,
    root: VarId,
    grid: &[f64],
    a: VarId,
    b: VarId,
    ev: &Evidence,
) -> Result<Vec<(f64, f64)>, OracleError> {
    if !net.is_root(root) {
        return Err(OracleError::NotRoot(net.name(root).to_string()));
    }
    if !net.variable(root).is_binary() {
        return Err(OracleError::NotBinary(net.name(root).to_string()));
    }
    grid.iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(OracleError::GridValue(p));
            }
            let swept = net.with_binary_prior(root, p)?;
            Ok((p, intercausal_influence(&swept, a, b, ev)?))
        })
        .collect()
}

/// Intercausal influence under likelihood-ratio evidence `[lambda, 1]` on a
/// binary `c`.
pub fn sweep_lambda(
    net: &Network,
    c: VarId,
    grid: &[f64],
    a: VarId,
    b: VarId,
) -> Result<Vec<(f64, f64)>, OracleError> {
    if !net.variable(c).is_binary() {
        return Err(OracleError::NotBinary(net.name(c).to_string()));
    }
    grid.iter()
        .map(|&lambda| {
            if !lambda.is_finite() || lambda < 0.0 {
                return Err(OracleError::GridValue(lambda));
            }
            let ev = Evidence::new().lambda(c, lambda);
            Ok((lambda, intercausal_influence(net, a, b, &ev)?))
        })
        .collect()
}

/// Sweep series as CSV with header `param,influence`, 17 significant digits.
pub fn sweep_csv(series: &[(f64, f64)]) -> String {
    let mut out = String::from("param,influence\n");
    for (param, influence) in series {
        let _ = writeln!(out, "{param:.16e},{influence:.16e}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::model::parse_network;

    fn sign_flip() -> (Network, [VarId; 4]) {
        let net = parse_network(bundled::SIGN_FLIP).unwrap();
        let ids = ["a", "b", "x", "c"].map(|n| net.require(n).unwrap());
        (net, ids)
    }

    #[test]
    fn empty_evidence_root_is_prior() {
        let (net, [a, ..]) = sign_flip();
        let net = net.with_binary_prior(a, 0.37).unwrap();
        let post = posterior(&net, a, &Evidence::new()).unwrap();
        assert!((post.probs[0] - 0.37).abs() < 1e-15);
    }

    #[test]
    fn joint_sums_to_one() {
        let (net, _) = sign_flip();
        let total = evidence_weight(&net, &Evidence::new()).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explaining_flip_at_half() {
        let (net, [a, b, _, c]) = sign_flip();
        let ev = Evidence::new().observe(c, 0);
        let d = intercausal_influence(&net, a, b, &ev).unwrap();
        // 0.99/1.49 - 0.5/0.8
        assert!((d - (0.99 / 1.49 - 0.625)).abs() < 1e-12, "{d}");
    }

    #[test]
    fn fully_present_x_is_negative() {
        let (net, [a, b, x, c]) = sign_flip();
        let net = net.with_binary_prior(x, 1.0).unwrap();
        let ev = Evidence::new().observe(c, 0);
        let d = intercausal_influence(&net, a, b, &ev).unwrap();
        // 0.99/1.79 - 0.8/1.4; cross-products 0.594 < 0.64
        assert!((d - (0.99 / 1.79 - 0.8 / 1.4)).abs() < 1e-12);
        assert!(d < 0.0);
    }

    #[test]
    fn independent_roots_without_evidence() {
        let (net, [a, b, ..]) = sign_flip();
        let d = intercausal_influence(&net, a, b, &Evidence::new()).unwrap();
        assert!(d.abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let (net, [a, b, x, c]) = sign_flip();
        let ev = Evidence::new().observe(a, 0);
        assert!(matches!(posterior(&net, a, &ev), Err(OracleError::QueryObserved(_))));
        let net0 = net.with_binary_prior(x, 0.0).unwrap();
        let ev = Evidence::new().observe(a, 1).observe(b, 1).observe(c, 0);
        assert_eq!(posterior(&net0, x, &ev).unwrap_err(), OracleError::ZeroProbabilityEvidence);
        assert!(matches!(sweep_prior(&net, c, &[0.5], a, b, &Evidence::new()), Err(OracleError::NotRoot(_))));
        let ev = Evidence::new().likelihood(c, vec![0.0, 0.0]);
        assert!(matches!(posterior(&net, a, &ev), Err(OracleError::InvalidEvidence(_))));
    }

    #[test]
    fn lambda_one_is_uninformative_and_limits_match_hard_evidence() {
        let (net, [a, b, _, c]) = sign_flip();
        let s = sweep_lambda(&net, c, &[1.0, 0.0, 1e9], a, b).unwrap();
        assert!(s[0].1.abs() < 1e-12);
        let against = intercausal_influence(&net, a, b, &Evidence::new().observe(c, 1)).unwrap();
        let towards = intercausal_influence(&net, a, b, &Evidence::new().observe(c, 0)).unwrap();
        assert!((s[1].1 - against).abs() < 1e-12);
        assert!((s[2].1 - towards).abs() < 1e-6);
    }

    #[test]
    fn csv_layout() {
        let csv = sweep_csv(&[(0.5, -0.25)]);
        assert_eq!(csv, "param,influence\n5.0000000000000000e-1,-2.5000000000000000e-1\n");
    }

    #[test]
    fn state_space_guard() {
        let mut b = Network::builder();
        let outcomes: Vec<String> = (0..64).map(|i| format!("o{i}")).collect();
        for i in 0..5 {
            let v = b.variable(&format!("v{i}"), &outcomes);
            b.prior(v, vec![1.0 / 64.0; 64]);
        }
        let net = b.build().unwrap();
        assert!(matches!(
            posterior(&net, VarId(0), &Evidence::new()),
            Err(OracleError::StateSpaceTooLarge { .. })
        ));
    }
}
