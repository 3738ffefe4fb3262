use serde::Serialize;

use super::{assignments, ModelError, Network, VarId};

/// A single variable standing in for all other parents of a child. Its
/// outcomes are the joint assignments of `members` in lexicographic order,
/// first member most significant. With no members it has one outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompoundVariable {
    pub members: Vec<VarId>,
    pub outcomes: Vec<Vec<usize>>,
    pub labels: Vec<String>,
}

impl CompoundVariable {
    pub fn card(&self) -> usize {
        self.outcomes.len()
    }
}

/// Conditional table of a child re-indexed as `[keep.0, keep.1, x*]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompoundCpt {
    pub child: VarId,
    pub keep: (VarId, VarId),
    pub keep_cards: (usize, usize),
    pub compound: CompoundVariable,
    pub child_card: usize,
    /// Flattened `[a][b][x*][child]`.
    table: Vec<f64>,
}

impl CompoundCpt {
    pub fn prob(&self, a: usize, b: usize, x: usize, outcome: usize) -> f64 {
        let (_, nb) = self.keep_cards;
        let nx = self.compound.card();
        self.table[((a * nb + b) * nx + x) * self.child_card + outcome]
    }

    /// Cumulative probability `Pr(child >= outcome index t | a, b, x*)`.
    pub fn tail(&self, a: usize, b: usize, x: usize, t: usize) -> f64 {
        (0..=t).map(|k| self.prob(a, b, x, k)).sum()
    }

    pub fn row_count(&self) -> usize {
        self.keep_cards.0 * self.keep_cards.1 * self.compound.card()
    }
}

/// Regroup `child`'s parents into the kept pair and one compound variable.
/// Probabilities are copied from the original rows.
pub fn compound_parents(
    net: &Network,
    child: VarId,
    keep: (VarId, VarId),
) -> Result<CompoundCpt, ModelError> {
    let cpt = net.cpt(child);
    let not_parent = |p: VarId| ModelError::NotAParent {
        parent: net.name(p).to_string(),
        child: net.name(child).to_string(),
    };
    let pos_a = cpt.position_of(keep.0).ok_or_else(|| not_parent(keep.0))?;
    let pos_b = cpt.position_of(keep.1).ok_or_else(|| not_parent(keep.1))?;
    if pos_a == pos_b {
        return Err(ModelError::Validation {
            constraint: "distinct-pair",
            detail: format!("pair must name two different parents, got `{}` twice", net.name(keep.0)),
        });
    }

    let others: Vec<(usize, VarId)> = cpt
        .parents()
        .iter()
        .copied()
        .enumerate()
        .filter(|&(i, _)| i != pos_a && i != pos_b)
        .collect();
    let member_cards: Vec<usize> = others.iter().map(|&(_, v)| net.card(v)).collect();
    let outcomes: Vec<Vec<usize>> = assignments(&member_cards).collect();
    let labels = outcomes
        .iter()
        .map(|vals| {
            if vals.is_empty() {
                "*".to_string()
            } else {
                others
                    .iter()
                    .zip(vals)
                    .map(|(&(_, v), &o)| net.variable(v).outcomes[o].clone())
                    .collect::<Vec<_>>()
                    .join(",")
            }
        })
        .collect();

    let (na, nb) = (net.card(keep.0), net.card(keep.1));
    let nc = cpt.child_card();
    let mut table = Vec::with_capacity(na * nb * outcomes.len() * nc);
    let mut full = vec![0usize; cpt.parents().len()];
    for a in 0..na {
        for b in 0..nb {
            for xs in &outcomes {
                full[pos_a] = a;
                full[pos_b] = b;
                for (&(pos, _), &v) in others.iter().zip(xs) {
                    full[pos] = v;
                }
                table.extend_from_slice(cpt.row(&full));
            }
        }
    }

    Ok(CompoundCpt {
        child,
        keep,
        keep_cards: (na, nb),
        compound: CompoundVariable {
            members: others.into_iter().map(|(_, v)| v).collect(),
            outcomes,
            labels,
        },
        child_card: nc,
        table,
    })
}
