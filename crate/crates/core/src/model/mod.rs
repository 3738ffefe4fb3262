//! Discrete belief networks: variables with ordered outcomes, conditional
//! tables, leaky Noisy-OR nodes, structural validation and the JSON file
//! format.
//!
//! Outcomes are ordered from the highest value to the lowest, so outcome
//! index `i < j` means outcome `i` is the higher value. Binary variables list
//! `[true, false]`.

mod compound;
mod cpt;
mod format;
mod noisy_or;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

pub use compound::{compound_parents, CompoundCpt, CompoundVariable};
pub use cpt::{Cpt, CptViolation, ROW_SUM_TOLERANCE};
pub use format::{parse_network, to_json};
pub use noisy_or::NoisyOrSpec;

/// Index of a variable within its network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub name: String,
    /// Highest value first.
    pub outcomes: Vec<String>,
}

impl Variable {
    pub fn card(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_binary(&self) -> bool {
        self.outcomes.len() == 2
    }

    /// Resolve an outcome by label, falling back to a numeric index.
    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes
            .iter()
            .position(|o| o == label)
            .or_else(|| label.parse::<usize>().ok().filter(|&i| i < self.card()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Table(Cpt),
    /// Raw parameters are kept next to their expansion; every qualitative
    /// computation reads the expansion.
    NoisyOr { spec: NoisyOrSpec, table: Cpt },
}

impl Node {
    pub fn cpt(&self) -> &Cpt {
        match self {
            Node::Table(cpt) => cpt,
            Node::NoisyOr { table, .. } => table,
        }
    }

    pub fn noisy_or(&self) -> Option<&NoisyOrSpec> {
        match self {
            Node::NoisyOr { spec, .. } => Some(spec),
            Node::Table(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation failed [{constraint}]: {detail}")]
    Validation {
        constraint: &'static str,
        detail: String,
    },
    #[error("node `{node}` references unknown parent `{parent}`")]
    DanglingParent { node: String, parent: String },
    #[error("graph has a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{variable}` has no outcome `{outcome}`")]
    UnknownOutcome { variable: String, outcome: String },
    #[error("`{parent}` is not a parent of `{child}`")]
    NotAParent { parent: String, child: String },
}

impl ModelError {
    fn validation(constraint: &'static str, detail: impl Into<String>) -> Self {
        ModelError::Validation {
            constraint,
            detail: detail.into(),
        }
    }
}

/// All assignments of a mixed-radix vector, first position most significant.
pub fn assignments(cards: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = cards.iter().product();
    let mut current = vec![0usize; cards.len()];
    (0..total).map(move |k| {
        if k > 0 {
            for pos in (0..cards.len()).rev() {
                current[pos] += 1;
                if current[pos] < cards[pos] {
                    break;
                }
                current[pos] = 0;
            }
        }
        current.clone()
    })
}

/// A validated, immutable belief network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Network {
    variables: Vec<Variable>,
    nodes: Vec<Node>,
    #[serde(skip)]
    by_name: HashMap<String, VarId>,
    #[serde(skip)]
    order: Vec<VarId>,
}

impl Network {
    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.variables.len()).map(VarId)
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.variables[id.0].name
    }

    pub fn card(&self, id: VarId) -> usize {
        self.variables[id.0].card()
    }

    pub fn id(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<VarId, ModelError> {
        self.id(name)
            .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    pub fn outcome(&self, id: VarId, label: &str) -> Result<usize, ModelError> {
        let var = self.variable(id);
        var.outcome_index(label)
            .ok_or_else(|| ModelError::UnknownOutcome {
                variable: var.name.clone(),
                outcome: label.to_string(),
            })
    }

    pub fn node(&self, id: VarId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn cpt(&self, id: VarId) -> &Cpt {
        self.nodes[id.0].cpt()
    }

    pub fn parents(&self, id: VarId) -> &[VarId] {
        self.cpt(id).parents()
    }

    pub fn is_root(&self, id: VarId) -> bool {
        self.parents(id).is_empty()
    }

    pub fn children(&self, id: VarId) -> Vec<VarId> {
        self.ids().filter(|&c| self.parents(c).contains(&id)).collect()
    }

    /// Topological order, parents before children.
    pub fn order(&self) -> &[VarId] {
        &self.order
    }

    /// Strict ancestors of `id`.
    pub fn ancestors(&self, id: VarId) -> BTreeSet<VarId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<VarId> = self.parents(id).to_vec();
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend_from_slice(self.parents(v));
            }
        }
        seen
    }

    /// Ancestors of `id` including `id` itself.
    pub fn ancestral_set(&self, id: VarId) -> BTreeSet<VarId> {
        let mut set = self.ancestors(id);
        set.insert(id);
        set
    }

    pub fn prior(&self, root: VarId) -> Option<&[f64]> {
        self.is_root(root).then(|| self.cpt(root).rows()[0].as_slice())
    }

    /// Copy of the network with a new prior on a root variable.
    pub fn with_prior(&self, root: VarId, probs: Vec<f64>) -> Result<Network, ModelError> {
        if !self.is_root(root) {
            return Err(ModelError::validation(
                "root-prior",
                format!("`{}` has parents; only roots carry a prior", self.name(root)),
            ));
        }
        let cpt = self
            .cpt(root)
            .with_rows(vec![probs])
            .map_err(|v| describe_violation(self, root, &v))?;
        let mut net = self.clone();
        net.nodes[root.0] = Node::Table(cpt);
        Ok(net)
    }

    /// Binary-root convenience: prior `[p, 1 - p]`.
    pub fn with_binary_prior(&self, root: VarId, p: f64) -> Result<Network, ModelError> {
        self.with_prior(root, vec![p, 1.0 - p])
    }

    /// Human-readable description of a parent assignment of `child`'s table.
    pub fn describe_row(&self, child: VarId, values: &[usize]) -> String {
        self.parents(child)
            .iter()
            .zip(values)
            .map(|(&p, &v)| format!("{}={}", self.name(p), self.variable(p).outcomes[v]))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    /// Builder pre-populated with this network's variables and nodes.
    pub fn to_builder(&self) -> NetworkBuilder {
        let mut b = NetworkBuilder {
            variables: self.variables.clone(),
            defs: Vec::new(),
        };
        for node in &self.nodes {
            let def = match node {
                Node::Table(cpt) => NodeDef::Table {
                    parents: cpt.parents().to_vec(),
                    rows: cpt.rows().to_vec(),
                },
                Node::NoisyOr { spec, .. } => NodeDef::NoisyOr {
                    parents: spec.parents.clone(),
                    strengths: spec.strengths.clone(),
                    leak: spec.leak,
                },
            };
            b.defs.push(Some(def));
        }
        b
    }
}

fn describe_violation(net_like: &impl NameLookup, child: VarId, v: &CptViolation) -> ModelError {
    let name = net_like.var_name(child);
    match v {
        CptViolation::RowCount { expected, found } => ModelError::validation(
            "row-count",
            format!("node `{name}` needs {expected} rows, found {found}"),
        ),
        CptViolation::RowLength {
            row,
            expected,
            found,
        } => ModelError::validation(
            "row-length",
            format!(
                "node `{name}` row {row} ({}) has {found} entries, expected {expected}",
                net_like.row_label(child, *row)
            ),
        ),
        CptViolation::OutOfRange { row, column, value } => ModelError::validation(
            "probability-range",
            format!(
                "node `{name}` row {row} ({}) entry {column} = {value} is outside [0, 1]",
                net_like.row_label(child, *row)
            ),
        ),
        CptViolation::RowSum { row, sum } => ModelError::validation(
            "row-sum",
            format!(
                "node `{name}` row {row} ({}) sums to {sum}, not 1",
                net_like.row_label(child, *row)
            ),
        ),
    }
}

trait NameLookup {
    fn var_name(&self, id: VarId) -> String;
    fn row_label(&self, child: VarId, row: usize) -> String;
}

impl NameLookup for Network {
    fn var_name(&self, id: VarId) -> String {
        self.name(id).to_string()
    }

    fn row_label(&self, child: VarId, row: usize) -> String {
        let cpt = self.cpt(child);
        let values = cpt.parent_assignments().nth(row);
        match values {
            Some(values) => self.describe_row(child, &values),
            None => String::new(),
        }
    }
}

#[derive(Debug, Clone)]
enum NodeDef {
    Table {
        parents: Vec<VarId>,
        rows: Vec<Vec<f64>>,
    },
    NoisyOr {
        parents: Vec<VarId>,
        strengths: Vec<f64>,
        leak: f64,
    },
}

impl NodeDef {
    fn parents(&self) -> &[VarId] {
        match self {
            NodeDef::Table { parents, .. } | NodeDef::NoisyOr { parents, .. } => parents,
        }
    }
}

/// Incremental construction of a [`Network`]; all checks run in `build`.
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    variables: Vec<Variable>,
    defs: Vec<Option<NodeDef>>,
}

impl NetworkBuilder {
    pub fn variable<S: AsRef<str>>(&mut self, name: &str, outcomes: &[S]) -> VarId {
        self.variables.push(Variable {
            name: name.to_string(),
            outcomes: outcomes.iter().map(|o| o.as_ref().to_string()).collect(),
        });
        self.defs.push(None);
        VarId(self.variables.len() - 1)
    }

    /// Binary variable `x` with outcomes `["X", "~X"]`.
    pub fn binary(&mut self, name: &str) -> VarId {
        let upper = name.to_uppercase();
        self.variable(name, &[upper.clone(), format!("~{upper}")])
    }

    pub fn id(&self, name: &str) -> Option<VarId> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .map(VarId)
    }

    pub fn table(&mut self, var: VarId, parents: &[VarId], rows: Vec<Vec<f64>>) -> &mut Self {
        self.defs[var.0] = Some(NodeDef::Table {
            parents: parents.to_vec(),
            rows,
        });
        self
    }

    pub fn prior(&mut self, var: VarId, probs: Vec<f64>) -> &mut Self {
        self.table(var, &[], vec![probs])
    }

    pub fn noisy_or(&mut self, var: VarId, parents: &[VarId], strengths: Vec<f64>, leak: f64) -> &mut Self {
        self.defs[var.0] = Some(NodeDef::NoisyOr {
            parents: parents.to_vec(),
            strengths,
            leak,
        });
        self
    }

    pub fn build(&self) -> Result<Network, ModelError> {
        let mut by_name = HashMap::new();
        for (i, var) in self.variables.iter().enumerate() {
            if by_name.insert(var.name.clone(), VarId(i)).is_some() {
                return Err(ModelError::validation(
                    "unique-variable-name",
                    format!("variable `{}` is declared twice", var.name),
                ));
            }
            if var.outcomes.len() < 2 {
                return Err(ModelError::validation(
                    "min-outcomes",
                    format!("variable `{}` needs at least 2 outcomes", var.name),
                ));
            }
            let distinct: HashSet<&String> = var.outcomes.iter().collect();
            if distinct.len() != var.outcomes.len() {
                return Err(ModelError::validation(
                    "unique-outcome-label",
                    format!("variable `{}` repeats an outcome label", var.name),
                ));
            }
        }

        let mut defs = Vec::with_capacity(self.defs.len());
        for (i, def) in self.defs.iter().enumerate() {
            let def = def.as_ref().ok_or_else(|| {
                ModelError::validation(
                    "node-per-variable",
                    format!("variable `{}` has no node entry", self.variables[i].name),
                )
            })?;
            let parents = def.parents();
            let distinct: HashSet<&VarId> = parents.iter().collect();
            if distinct.len() != parents.len() {
                return Err(ModelError::validation(
                    "unique-parent",
                    format!("node `{}` lists a parent twice", self.variables[i].name),
                ));
            }
            if let Some(p) = parents.iter().find(|p| p.0 >= self.variables.len()) {
                return Err(ModelError::DanglingParent {
                    node: self.variables[i].name.clone(),
                    parent: p.to_string(),
                });
            }
            defs.push(def);
        }

        let order = self.topological_order(&defs)?;

        let mut nodes = Vec::with_capacity(defs.len());
        for (i, def) in defs.iter().enumerate() {
            let child = VarId(i);
            let card = self.variables[i].card();
            let node = match def {
                NodeDef::Table { parents, rows } => {
                    let cpt = Cpt::new(
                        child,
                        card,
                        parents.iter().map(|&p| (p, self.variables[p.0].card())).collect(),
                        rows.clone(),
                    )
                    .map_err(|v| describe_violation(self, child, &v))?;
                    Node::Table(cpt)
                }
                NodeDef::NoisyOr {
                    parents,
                    strengths,
                    leak,
                } => {
                    let name = &self.variables[i].name;
                    if card != 2 || parents.iter().any(|p| self.variables[p.0].card() != 2) {
                        return Err(ModelError::validation(
                            "noisy-or-binary",
                            format!("noisy-or node `{name}` and its parents must be binary"),
                        ));
                    }
                    if strengths.len() != parents.len() {
                        return Err(ModelError::validation(
                            "noisy-or-arity",
                            format!(
                                "noisy-or node `{name}` has {} parents but {} strengths",
                                parents.len(),
                                strengths.len()
                            ),
                        ));
                    }
                    let in_unit = |x: &f64| x.is_finite() && (0.0..=1.0).contains(x);
                    if !strengths.iter().all(in_unit) || !in_unit(leak) {
                        return Err(ModelError::validation(
                            "noisy-or-range",
                            format!("noisy-or node `{name}` has a parameter outside [0, 1]"),
                        ));
                    }
                    let spec = NoisyOrSpec {
                        child,
                        parents: parents.clone(),
                        strengths: strengths.clone(),
                        leak: *leak,
                    };
                    let table = spec.expand();
                    Node::NoisyOr { spec, table }
                }
            };
            nodes.push(node);
        }

        Ok(Network {
            variables: self.variables.clone(),
            nodes,
            by_name,
            order,
        })
    }

    fn topological_order(&self, defs: &[&NodeDef]) -> Result<Vec<VarId>, ModelError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let n = defs.len();
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        let mut path: Vec<usize> = Vec::new();

        fn visit(
            v: usize,
            defs: &[&NodeDef],
            state: &mut [u8],
            order: &mut Vec<VarId>,
            path: &mut Vec<usize>,
        ) -> Result<(), Vec<usize>> {
            match state[v] {
                2 => return Ok(()),
                1 => {
                    let start = path.iter().position(|&p| p == v).unwrap_or(0);
                    let mut cycle = path[start..].to_vec();
                    cycle.push(v);
                    return Err(cycle);
                }
                _ => {}
            }
            state[v] = 1;
            path.push(v);
            for p in defs[v].parents() {
                visit(p.0, defs, state, order, path)?;
            }
            path.pop();
            state[v] = 2;
            order.push(VarId(v));
            Ok(())
        }

        for v in 0..n {
            visit(v, defs, &mut state, &mut order, &mut path).map_err(|cycle| {
                // path runs child -> parent; report it in edge direction
                let mut names: Vec<String> = cycle
                    .iter()
                    .map(|&i| self.variables[i].name.clone())
                    .collect();
                names.reverse();
                ModelError::Cycle(names)
            })?;
        }
        Ok(order)
    }
}

impl NameLookup for NetworkBuilder {
    fn var_name(&self, id: VarId) -> String {
        self.variables[id.0].name.clone()
    }

    fn row_label(&self, child: VarId, row: usize) -> String {
        let Some(def) = &self.defs[child.0] else {
            return String::new();
        };
        let parents = def.parents();
        let cards: Vec<usize> = parents.iter().map(|p| self.variables[p.0].card()).collect();
        let values = assignments(&cards).nth(row);
        match values {
            Some(values) => parents
                .iter()
                .zip(values)
                .map(|(p, v)| {
                    let var = &self.variables[p.0];
                    format!("{}={}", var.name, var.outcomes[v])
                })
                .collect::<Vec<_>>()
                .join(", "),
            None => String::new(),
        }
    }
}
