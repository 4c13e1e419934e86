// SPDX-License-Identifier: Apache-2.0

//! Formulas over noisy gates.
//!
//! A [`GateTree`] is the gate graph of a formula: gates are vertices and each
//! gate's output feeds at most one other gate. Leaves of the wiring are
//! primary inputs and constants. Primary inputs may fan out to several gates;
//! gate outputs may not.

mod gen;
mod parse;
pub mod shapes;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub use gen::{gen_balanced, gen_line, gen_random, RandomTreeConfig, MAX_GENERATED_INPUTS};
pub use parse::{parse_circuit, CircuitFile};

/// Largest fan-in accepted for a single gate.
pub const MAX_ARITY: usize = 16;

pub type GateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("gate {gate}: cycle through the gate-child relation")]
    Cycle { gate: usize },
    #[error("gate {gate}: reference to unknown gate {target}")]
    DanglingReference { gate: usize, target: usize },
    #[error("gate {gate}: gate has no children")]
    EmptyGate { gate: usize },
    #[error("gate {gate}: arity {arity} exceeds k_max {k_max}")]
    ArityTooLarge { gate: usize, arity: usize, k_max: usize },
    #[error("gate {gate}: output feeds gates {first} and {second}")]
    DuplicateParent { gate: usize, first: usize, second: usize },
    #[error("gate {gate}: truth table has {len} entries, arity {arity} needs {expected}")]
    TruthTableLength { gate: usize, len: usize, arity: usize, expected: usize },
    #[error("gate {gate}: duplicate gate id")]
    DuplicateId { gate: usize },
    #[error("gate {gate}: not connected to the root")]
    Disconnected { gate: usize },
    #[error("root gate {0} does not exist")]
    UnknownRoot(usize),
    #[error("gate {gate}: input index {input} out of range (n_inputs = {n_inputs})")]
    InputOutOfRange { gate: usize, input: usize, n_inputs: usize },
    #[error("input {0} is not connected to any gate")]
    MissingInput(usize),
    #[error("gate {gate}: constant must be 0 or 1, got {value}")]
    BadConstant { gate: usize, value: u64 },
    #[error("gate {gate}: unknown gate kind `{kind}`")]
    UnknownKind { gate: usize, kind: String },
    #[error("gate ids must be dense 0..{len}, found {gate} at position {position}")]
    NonDenseIds { gate: usize, position: usize, len: usize },
    #[error("unknown input index {0}")]
    UnknownInput(usize),
    #[error("generator parameters rejected: {0}")]
    Generator(String),
    #[error("malformed circuit file: {0}")]
    Format(String),
}

/// Boolean function computed by a gate, before noise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GateKind {
    Nand,
    Nor,
    And,
    Or,
    Xor,
    /// Output for each child pattern; index bits are the children's values
    /// with the first child as the most significant bit.
    TruthTable(Vec<bool>),
}

impl GateKind {
    pub fn name(&self) -> String {
        match self {
            GateKind::Nand => "NAND".into(),
            GateKind::Nor => "NOR".into(),
            GateKind::And => "AND".into(),
            GateKind::Or => "OR".into(),
            GateKind::Xor => "XOR".into(),
            GateKind::TruthTable(t) => t.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>(),
        }
    }

    pub fn is_xor(&self) -> bool {
        matches!(self, GateKind::Xor)
    }

    /// Noiseless output for child values `bits`.
    pub fn eval(&self, bits: &[bool]) -> bool {
        match self {
            GateKind::And => bits.iter().all(|&b| b),
            GateKind::Nand => !bits.iter().all(|&b| b),
            GateKind::Or => bits.iter().any(|&b| b),
            GateKind::Nor => !bits.iter().any(|&b| b),
            GateKind::Xor => bits.iter().fold(false, |acc, &b| acc ^ b),
            GateKind::TruthTable(table) => {
                let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                table[index]
            }
        }
    }

    /// Probability the noiseless output is 1 when child `j` is 1 with
    /// probability `p[j]`, independently.
    pub fn prob_one(&self, p: &[f64]) -> f64 {
        match self {
            GateKind::And => p.iter().product(),
            GateKind::Nand => 1.0 - p.iter().product::<f64>(),
            GateKind::Or => 1.0 - p.iter().map(|q| 1.0 - q).product::<f64>(),
            GateKind::Nor => p.iter().map(|q| 1.0 - q).product(),
            GateKind::Xor => 0.5 * (1.0 - p.iter().map(|q| 1.0 - 2.0 * q).product::<f64>()),
            GateKind::TruthTable(table) => {
                let arity = p.len();
                let mut total = 0.0;
                for (index, &out) in table.iter().enumerate() {
                    if !out {
                        continue;
                    }
                    let mut w = 1.0;
                    for (j, &q) in p.iter().enumerate() {
                        let bit = (index >> (arity - 1 - j)) & 1 == 1;
                        w *= if bit { q } else { 1.0 - q };
                    }
                    total += w;
                }
                total
            }
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    /// Accepts the named kinds (any case) or a truth-table bit string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NAND" => Ok(GateKind::Nand),
            "NOR" => Ok(GateKind::Nor),
            "AND" => Ok(GateKind::And),
            "OR" => Ok(GateKind::Or),
            "XOR" => Ok(GateKind::Xor),
            bits if !bits.is_empty() && bits.chars().all(|c| c == '0' || c == '1') => {
                Ok(GateKind::TruthTable(bits.chars().map(|c| c == '1').collect()))
            }
            other => Err(format!("unknown gate kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChildRef {
    Gate(GateId),
    Input(usize),
    Const(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateNode {
    pub id: GateId,
    pub kind: GateKind,
    pub children: Vec<ChildRef>,
}

impl GateNode {
    pub fn new(id: GateId, kind: GateKind, children: Vec<ChildRef>) -> Self {
        GateNode { id, kind, children }
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }

    pub fn gate_children(&self) -> impl Iterator<Item = GateId> + '_ {
        self.children.iter().filter_map(|c| match c {
            ChildRef::Gate(g) => Some(*g),
            _ => None,
        })
    }

    /// A leaf gate takes only inputs and constants.
    pub fn is_leaf(&self) -> bool {
        self.gate_children().next().is_none()
    }
}

/// Gate sequences from a leaf gate up to the root, one per leaf gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalPathSet {
    pub paths: Vec<Vec<GateId>>,
}

impl MaximalPathSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// A validated formula. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GateTree {
    gates: Vec<GateNode>,
    root: GateId,
    n_inputs: usize,
    k_max: usize,
    parent: Vec<Option<GateId>>,
    level: Vec<usize>,
    postorder: Vec<GateId>,
    depth: usize,
}

/// Checks structural invariants over gates with arbitrary (unique) ids and
/// returns the post-order (children before parents) as positions in `gates`.
pub(crate) fn validate(
    gates: &[GateNode],
    root: GateId,
    n_inputs: usize,
    k_max: usize,
) -> Result<Vec<usize>, CircuitError> {
    use std::collections::HashMap;

    let mut position: HashMap<GateId, usize> = HashMap::with_capacity(gates.len());
    for (pos, g) in gates.iter().enumerate() {
        if position.insert(g.id, pos).is_some() {
            return Err(CircuitError::DuplicateId { gate: g.id });
        }
    }
    let root_pos = *position.get(&root).ok_or(CircuitError::UnknownRoot(root))?;

    let mut parent: Vec<Option<GateId>> = vec![None; gates.len()];
    let mut seen_input = vec![false; n_inputs];
    for g in gates {
        if g.children.is_empty() {
            return Err(CircuitError::EmptyGate { gate: g.id });
        }
        if g.arity() > k_max {
            return Err(CircuitError::ArityTooLarge { gate: g.id, arity: g.arity(), k_max });
        }
        if let GateKind::TruthTable(table) = &g.kind {
            let expected = 1usize << g.arity();
            if table.len() != expected {
                return Err(CircuitError::TruthTableLength {
                    gate: g.id,
                    len: table.len(),
                    arity: g.arity(),
                    expected,
                });
            }
        }
        for child in &g.children {
            match *child {
                ChildRef::Gate(target) => {
                    if target == g.id {
                        return Err(CircuitError::Cycle { gate: g.id });
                    }
                    let pos = *position.get(&target).ok_or(CircuitError::DanglingReference { gate: g.id, target })?;
                    if let Some(first) = parent[pos] {
                        return Err(CircuitError::DuplicateParent { gate: target, first, second: g.id });
                    }
                    parent[pos] = Some(g.id);
                }
                ChildRef::Input(i) => {
                    if i >= n_inputs {
                        return Err(CircuitError::InputOutOfRange { gate: g.id, input: i, n_inputs });
                    }
                    seen_input[i] = true;
                }
                ChildRef::Const(_) => {}
            }
        }
    }
    if let Some(p) = parent[root_pos] {
        // Root fed into another gate: following parents from the root must loop.
        return Err(CircuitError::Cycle { gate: p });
    }

    // Iterative post-order from the root.
    let mut order = Vec::with_capacity(gates.len());
    let mut visited = vec![false; gates.len()];
    let mut stack: Vec<(usize, usize)> = vec![(root_pos, 0)];
    visited[root_pos] = true;
    while let Some(&mut (pos, ref mut next)) = stack.last_mut() {
        let children = &gates[pos].children;
        let mut pushed = false;
        while *next < children.len() {
            let child = children[*next];
            *next += 1;
            if let ChildRef::Gate(target) = child {
                let cpos = position[&target];
                if visited[cpos] {
                    return Err(CircuitError::Cycle { gate: target });
                }
                visited[cpos] = true;
                stack.push((cpos, 0));
                pushed = true;
                break;
            }
        }
        if !pushed {
            order.push(pos);
            stack.pop();
        }
    }
    if let Some(pos) = visited.iter().position(|v| !v) {
        let gate = gates[pos].id;
        // Unreached gates either hang off nothing or sit on a parent cycle.
        return Err(if parent[pos].is_some() {
            CircuitError::Cycle { gate }
        } else {
            CircuitError::Disconnected { gate }
        });
    }
    if let Some(i) = seen_input.iter().position(|s| !s) {
        return Err(CircuitError::MissingInput(i));
    }
    Ok(order)
}

impl GateTree {
    /// Builds a tree from gates whose ids equal their positions.
    pub fn new(gates: Vec<GateNode>, root: GateId, n_inputs: usize, k_max: usize) -> Result<Self, CircuitError> {
        for (pos, g) in gates.iter().enumerate() {
            if g.id != pos {
                return Err(CircuitError::NonDenseIds { gate: g.id, position: pos, len: gates.len() });
            }
        }
        let postorder = validate(&gates, root, n_inputs, k_max)?;

        let mut parent = vec![None; gates.len()];
        for g in &gates {
            for c in g.gate_children() {
                parent[c] = Some(g.id);
            }
        }
        let mut level = vec![0usize; gates.len()];
        for &g in postorder.iter().rev() {
            if let Some(p) = parent[g] {
                level[g] = level[p] + 1;
            }
        }
        let depth = postorder.iter().filter(|&&g| gates[g].is_leaf()).map(|&g| level[g]).max().unwrap_or(0);
        Ok(GateTree { gates, root, n_inputs, k_max, parent, level, postorder, depth })
    }

    pub fn gates(&self) -> &[GateNode] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &GateNode {
        &self.gates[id]
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn root(&self) -> GateId {
        self.root
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Longest root-to-leaf-gate path, counted in edges (a single gate has depth 0).
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn parent(&self, id: GateId) -> Option<GateId> {
        self.parent[id]
    }

    /// Distance from the root, in edges.
    pub fn level(&self, id: GateId) -> usize {
        self.level[id]
    }

    /// Gates with children listed before their parents; the root is last.
    pub fn postorder(&self) -> &[GateId] {
        &self.postorder
    }

    pub fn leaf_gates(&self) -> Vec<GateId> {
        (0..self.len()).filter(|&g| self.gates[g].is_leaf()).collect()
    }

    pub fn all_xor(&self) -> bool {
        self.gates.iter().all(|g| g.kind.is_xor())
    }

    /// Gates from `id` up to and including the root.
    pub fn path_to_root(&self, id: GateId) -> Vec<GateId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path
    }

    pub fn maximal_paths(&self) -> MaximalPathSet {
        MaximalPathSet { paths: self.leaf_gates().into_iter().map(|g| self.path_to_root(g)).collect() }
    }

    /// Gates fed directly by input `i`, in id order.
    pub fn gates_reading_input(&self, i: usize) -> Vec<GateId> {
        (0..self.len()).filter(|&g| self.gates[g].children.contains(&ChildRef::Input(i))).collect()
    }

    /// Path from every gate reading input `i` up to the root.
    pub fn input_paths(&self, i: usize) -> Result<Vec<Vec<GateId>>, CircuitError> {
        if i >= self.n_inputs {
            return Err(CircuitError::UnknownInput(i));
        }
        Ok(self.gates_reading_input(i).into_iter().map(|g| self.path_to_root(g)).collect())
    }

    /// Path from the gate reading input `i` up to the root. When the input
    /// fans out, the longest such path is returned (lowest gate id on ties).
    pub fn input_path(&self, i: usize) -> Result<Vec<GateId>, CircuitError> {
        let paths = self.input_paths(i)?;
        let mut best: Option<Vec<GateId>> = None;
        for p in paths {
            if best.as_ref().is_none_or(|b| p.len() > b.len()) {
                best = Some(p);
            }
        }
        best.ok_or(CircuitError::MissingInput(i))
    }

    /// `max_i |P_i|` over primary inputs.
    pub fn max_input_path_len(&self) -> usize {
        (0..self.len())
            .filter(|&g| self.gates[g].children.iter().any(|c| matches!(c, ChildRef::Input(_))))
            .map(|g| self.level[g] + 1)
            .max()
            .unwrap_or(0)
    }
}
