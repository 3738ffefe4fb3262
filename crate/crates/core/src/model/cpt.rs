use serde::Serialize;

use super::{assignments, VarId};

/// Row sums may deviate from 1 by at most this much. Rows are never
/// renormalized.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Conditional probability table of a child given an ordered parent list.
///
/// Rows are stored in lexicographic order over parent outcome indices with
/// the first parent most significant; each row lists probabilities in the
/// child's outcome order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cpt {
    child: VarId,
    child_card: usize,
    parents: Vec<VarId>,
    parent_cards: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

/// Structural problem with a table, reported by row index so the caller can
/// render parent labels.
#[derive(Debug, Clone, PartialEq)]
pub enum CptViolation {
    RowCount { expected: usize, found: usize },
    RowLength { row: usize, expected: usize, found: usize },
    OutOfRange { row: usize, column: usize, value: f64 },
    RowSum { row: usize, sum: f64 },
}

impl Cpt {
    pub fn new(
        child: VarId,
        child_card: usize,
        parents: Vec<(VarId, usize)>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Cpt, CptViolation> {
        let (parents, parent_cards): (Vec<_>, Vec<_>) = parents.into_iter().unzip();
        let expected: usize = parent_cards.iter().product();
        if rows.len() != expected {
            return Err(CptViolation::RowCount {
                expected,
                found: rows.len(),
            });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != child_card {
                return Err(CptViolation::RowLength {
                    row: r,
                    expected: child_card,
                    found: row.len(),
                });
            }
            for (c, &p) in row.iter().enumerate() {
                if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                    return Err(CptViolation::OutOfRange {
                        row: r,
                        column: c,
                        value: p,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(CptViolation::RowSum { row: r, sum });
            }
        }
        Ok(Cpt {
            child,
            child_card,
            parents,
            parent_cards,
            rows,
        })
    }

    pub fn child(&self) -> VarId {
        self.child
    }

    pub fn child_card(&self) -> usize {
        self.child_card
    }

    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    pub fn parent_cards(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn position_of(&self, parent: VarId) -> Option<usize> {
        self.parents.iter().position(|&p| p == parent)
    }

    /// Index of the row for a full parent assignment.
    pub fn row_index(&self, parent_values: &[usize]) -> usize {
        debug_assert_eq!(parent_values.len(), self.parents.len());
        parent_values
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&v, &card)| acc * card + v)
    }

    pub fn row(&self, parent_values: &[usize]) -> &[f64] {
        &self.rows[self.row_index(parent_values)]
    }

    pub fn prob(&self, parent_values: &[usize], outcome: usize) -> f64 {
        self.row(parent_values)[outcome]
    }

    /// Parent assignments in row order.
    pub fn parent_assignments(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        assignments(&self.parent_cards)
    }

    /// Same table with one row replaced; used to swap root priors.
    pub(crate) fn with_rows(&self, rows: Vec<Vec<f64>>) -> Result<Cpt, CptViolation> {
        Cpt::new(
            self.child,
            self.child_card,
            self.parents.iter().copied().zip(self.parent_cards.iter().copied()).collect(),
            rows,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_parent() -> Cpt {
        Cpt::new(
            VarId(2),
            2,
            vec![(VarId(0), 2), (VarId(1), 3)],
            vec![
                vec![0.1, 0.9],
                vec![0.2, 0.8],
                vec![0.3, 0.7],
                vec![0.4, 0.6],
                vec![0.5, 0.5],
                vec![0.6, 0.4],
            ],
        )
        .unwrap()
    }

    #[test]
    fn first_parent_is_most_significant() {
        let cpt = two_parent();
        assert_eq!(cpt.row_index(&[0, 0]), 0);
        assert_eq!(cpt.row_index(&[0, 2]), 2);
        assert_eq!(cpt.row_index(&[1, 0]), 3);
        assert_eq!(cpt.prob(&[1, 1], 0), 0.5);
        let rows: Vec<_> = cpt.parent_assignments().collect();
        assert_eq!(rows[4], vec![1, 1]);
    }

    #[test]
    fn rejects_bad_row_sum() {
        let err = Cpt::new(VarId(0), 2, vec![], vec![vec![0.5, 0.51]]).unwrap_err();
        assert!(matches!(err, CptViolation::RowSum { row: 0, .. }));
    }

    #[test]
    fn rejects_wrong_row_count_and_range() {
        let err = Cpt::new(VarId(1), 2, vec![(VarId(0), 2)], vec![vec![0.5, 0.5]]).unwrap_err();
        assert_eq!(err, CptViolation::RowCount { expected: 2, found: 1 });
        let err = Cpt::new(VarId(0), 2, vec![], vec![vec![1.5, -0.5]]).unwrap_err();
        assert!(matches!(err, CptViolation::OutOfRange { column: 0, .. }));
    }

    #[test]
    fn tolerance_is_inclusive() {
        assert!(Cpt::new(VarId(0), 2, vec![], vec![vec![0.3, 0.7 + 5e-10]]).is_ok());
    }
}
