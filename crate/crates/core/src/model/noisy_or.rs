use serde::Serialize;

use super::{assignments, Cpt, VarId};

/// Leaky Noisy-OR parameterization of a binary child with binary parents.
///
/// A parent is present when it takes outcome index 0 (`true`). The child is
/// false only when the leak does not fire and every present cause fails:
/// `Pr(false | T) = (1 - leak) * prod_{i in T} (1 - strength_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisyOrSpec {
    pub child: VarId,
    pub parents: Vec<VarId>,
    pub strengths: Vec<f64>,
    pub leak: f64,
}

impl NoisyOrSpec {
    /// Probability that the child is false given which parents are present.
    pub fn prob_false(&self, present: &[bool]) -> f64 {
        self.strengths
            .iter()
            .zip(present)
            .filter(|(_, &on)| on)
            .fold(1.0 - self.leak, |acc, (s, _)| acc * (1.0 - s))
    }

    /// Expand into a full table. Callers validate the spec first.
    pub fn expand(&self) -> Cpt {
        let cards = vec![2; self.parents.len()];
        let rows = assignments(&cards)
            .map(|values| {
                let present: Vec<bool> = values.iter().map(|&v| v == 0).collect();
                let off = self.prob_false(&present);
                vec![1.0 - off, off]
            })
            .collect();
        Cpt::new(
            self.child,
            2,
            self.parents.iter().map(|&p| (p, 2)).collect(),
            rows,
        )
        .expect("noisy-or expansion yields a valid table for parameters in [0, 1]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gate(strengths: Vec<f64>, leak: f64) -> NoisyOrSpec {
        NoisyOrSpec {
            child: VarId(strengths.len()),
            parents: (0..strengths.len()).map(VarId).collect(),
            strengths,
            leak,
        }
    }

    #[test]
    fn one_cause_without_leak() {
        let cpt = gate(vec![0.7], 0.0).expand();
        assert!((cpt.prob(&[0], 0) - 0.7).abs() < 1e-15);
        assert_eq!(cpt.prob(&[1], 0), 0.0);
    }

    #[test]
    fn all_causes_present() {
        let (p, q, r, l) = (0.3, 0.6, 0.25, 0.1);
        let cpt = gate(vec![p, q, r], l).expand();
        let expected = (1.0 - l) * (1.0 - p) * (1.0 - q) * (1.0 - r);
        assert!((cpt.prob(&[0, 0, 0], 1) - expected).abs() < 1e-15);
        assert!((cpt.prob(&[1, 1, 1], 1) - (1.0 - l)).abs() < 1e-15);
    }

    #[test]
    fn zero_strengths_leave_only_the_leak() {
        let cpt = gate(vec![0.0, 0.0], 0.35).expand();
        for row in cpt.rows() {
            assert!((row[0] - 0.35).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn expansion_is_a_valid_table(
            strengths in proptest::collection::vec(0.0f64..=1.0, 1..5),
            leak in 0.0f64..=1.0,
        ) {
            let spec = gate(strengths, leak);
            let cpt = spec.expand();
            prop_assert_eq!(cpt.rows().len(), 1 << spec.parents.len());
            for row in cpt.rows() {
                prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }
    }
}
