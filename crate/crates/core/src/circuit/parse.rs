// SPDX-License-Identifier: Apache-2.0

//! JSON circuit files.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{validate, ChildRef, CircuitError, GateKind, GateNode, GateTree};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawKind {
    Named(String),
    Table { table: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawChild {
    Input(usize),
    Gate(usize),
    Const(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGate {
    pub id: usize,
    pub kind: RawKind,
    pub children: Vec<RawChild>,
}

/// On-disk layout. `k_max` and `n_inputs` default to the values implied by
/// the gates when omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_inputs: Option<usize>,
    pub root: usize,
    pub gates: Vec<RawGate>,
}

fn convert_kind(gate: usize, raw: &RawKind) -> Result<GateKind, CircuitError> {
    match raw {
        RawKind::Named(name) => match name.to_ascii_uppercase().as_str() {
            "NAND" => Ok(GateKind::Nand),
            "NOR" => Ok(GateKind::Nor),
            "AND" => Ok(GateKind::And),
            "OR" => Ok(GateKind::Or),
            "XOR" => Ok(GateKind::Xor),
            _ => Err(CircuitError::UnknownKind { gate, kind: name.clone() }),
        },
        RawKind::Table { table } => {
            if table.is_empty() || !table.chars().all(|c| c == '0' || c == '1') {
                return Err(CircuitError::UnknownKind { gate, kind: table.clone() });
            }
            Ok(GateKind::TruthTable(table.chars().map(|c| c == '1').collect()))
        }
    }
}

impl CircuitFile {
    /// Validates and renumbers gates so children come before parents.
    pub fn into_tree(self) -> Result<GateTree, CircuitError> {
        let mut gates = Vec::with_capacity(self.gates.len());
        let mut max_input = None;
        let mut max_arity = 0;
        for g in &self.gates {
            let kind = convert_kind(g.id, &g.kind)?;
            let mut children = Vec::with_capacity(g.children.len());
            for c in &g.children {
                children.push(match *c {
                    RawChild::Input(i) => {
                        max_input = max_input.max(Some(i));
                        ChildRef::Input(i)
                    }
                    RawChild::Gate(id) => ChildRef::Gate(id),
                    RawChild::Const(0) => ChildRef::Const(false),
                    RawChild::Const(1) => ChildRef::Const(true),
                    RawChild::Const(value) => return Err(CircuitError::BadConstant { gate: g.id, value }),
                });
            }
            max_arity = max_arity.max(children.len());
            gates.push(GateNode::new(g.id, kind, children));
        }
        let n_inputs = self.n_inputs.unwrap_or(max_input.map_or(0, |m| m + 1));
        let k_max = self.k_max.unwrap_or(max_arity.max(1));

        let order = validate(&gates, self.root, n_inputs, k_max)?;
        let new_id: HashMap<usize, usize> = order.iter().enumerate().map(|(new, &pos)| (gates[pos].id, new)).collect();
        let renumbered = order
            .iter()
            .enumerate()
            .map(|(new, &pos)| {
                let g = &gates[pos];
                let children = g
                    .children
                    .iter()
                    .map(|c| match *c {
                        ChildRef::Gate(id) => ChildRef::Gate(new_id[&id]),
                        other => other,
                    })
                    .collect();
                GateNode::new(new, g.kind.clone(), children)
            })
            .collect();
        GateTree::new(renumbered, new_id[&self.root], n_inputs, k_max)
    }

    pub fn from_tree(tree: &GateTree) -> Self {
        let gates = tree
            .gates()
            .iter()
            .map(|g| RawGate {
                id: g.id,
                kind: match &g.kind {
                    GateKind::TruthTable(_) => RawKind::Table { table: g.kind.name() },
                    named => RawKind::Named(named.name()),
                },
                children: g
                    .children
                    .iter()
                    .map(|c| match *c {
                        ChildRef::Input(i) => RawChild::Input(i),
                        ChildRef::Gate(id) => RawChild::Gate(id),
                        ChildRef::Const(b) => RawChild::Const(b as u64),
                    })
                    .collect(),
            })
            .collect();
        CircuitFile { k_max: Some(tree.k_max()), n_inputs: Some(tree.n_inputs()), root: tree.root(), gates }
    }
}

pub fn parse_circuit(text: &str) -> Result<GateTree, CircuitError> {
    let file: CircuitFile = serde_json::from_str(text).map_err(|e| CircuitError::Format(e.to_string()))?;
    file.into_tree()
}

impl GateTree {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitFile::from_tree(self)).expect("circuit files always serialize")
    }
}
