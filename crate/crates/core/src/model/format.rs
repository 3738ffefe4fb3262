//! JSON network documents.
//!
//! ```json
//! {
//!   "variables": [{"name": "a", "outcomes": ["A", "~A"]}, ...],
//!   "nodes": [
//!     {"var": "a", "parents": [], "cpt": [[0.5, 0.5]]},
//!     {"var": "c", "parents": ["a", "b"], "noisy_or": {"strengths": [0.8, 0.6], "leak": 0.01}}
//!   ]
//! }
//! ```

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ModelError, Network, NetworkBuilder, Node, VarId};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    variables: Vec<VariableDoc>,
    nodes: Vec<NodeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    outcomes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    var: String,
    parents: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cpt: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noisy_or: Option<NoisyOrDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoisyOrDoc {
    strengths: Vec<f64>,
    leak: f64,
}

/// Parse and validate a network document.
pub fn parse_network(document: &str) -> Result<Network, ModelError> {
    let doc: Document = serde_json::from_str(document).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut builder = NetworkBuilder::default();
    let mut ids: HashMap<&str, VarId> = HashMap::new();
    for var in &doc.variables {
        let id = builder.variable(&var.name, &var.outcomes);
        ids.entry(var.name.as_str()).or_insert(id);
    }

    let mut seen = vec![false; doc.variables.len()];
    for node in &doc.nodes {
        let id = *ids
            .get(node.var.as_str())
            .ok_or_else(|| ModelError::UnknownVariable(node.var.clone()))?;
        if std::mem::replace(&mut seen[id.0], true) {
            return Err(ModelError::Validation {
                constraint: "node-per-variable",
                detail: format!("variable `{}` has more than one node entry", node.var),
            });
        }
        let parents = node
            .parents
            .iter()
            .map(|p| {
                ids.get(p.as_str()).copied().ok_or_else(|| ModelError::DanglingParent {
                    node: node.var.clone(),
                    parent: p.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        match (&node.cpt, &node.noisy_or) {
            (Some(rows), None) => {
                builder.table(id, &parents, rows.clone());
            }
            (None, Some(gate)) => {
                builder.noisy_or(id, &parents, gate.strengths.clone(), gate.leak);
            }
            _ => {
                return Err(ModelError::Validation {
                    constraint: "node-body",
                    detail: format!(
                        "node `{}` must carry exactly one of `cpt` or `noisy_or`",
                        node.var
                    ),
                })
            }
        }
    }
    builder.build()
}

/// Serialize a network; Noisy-OR nodes are written unexpanded.
pub fn to_json(net: &Network) -> String {
    let doc = Document {
        variables: net
            .variables()
            .iter()
            .map(|v| VariableDoc {
                name: v.name.clone(),
                outcomes: v.outcomes.clone(),
            })
            .collect(),
        nodes: net
            .ids()
            .map(|id| {
                let parents = net.parents(id).iter().map(|&p| net.name(p).to_string()).collect();
                match net.node(id) {
                    Node::Table(cpt) => NodeDoc {
                        var: net.name(id).to_string(),
                        parents,
                        cpt: Some(cpt.rows().to_vec()),
                        noisy_or: None,
                    },
                    Node::NoisyOr { spec, .. } => NodeDoc {
                        var: net.name(id).to_string(),
                        parents,
                        cpt: None,
                        noisy_or: Some(NoisyOrDoc {
                            strengths: spec.strengths.clone(),
                            leak: spec.leak,
                        }),
                    },
                }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("network documents always serialize")
}
