// SPDX-License-Identifier: Apache-2.0

//! Generators for balanced trees, line circuits and random formulas.

use rand::Rng;

use super::{ChildRef, CircuitError, GateKind, GateNode, GateTree};

/// Generators refuse to build trees with more inputs than this.
pub const MAX_GENERATED_INPUTS: usize = 1 << 20;

/// Full `k`-ary tree with gate levels `0..=d`. Gates are numbered breadth
/// first from the root (id 0); inputs are numbered left to right.
pub fn gen_balanced(k: usize, d: usize, kind: GateKind) -> Result<GateTree, CircuitError> {
    if k == 0 {
        return Err(CircuitError::Generator("arity k must be at least 1".into()));
    }
    let mut n_inputs = k;
    for _ in 0..d {
        n_inputs = n_inputs
            .checked_mul(k)
            .filter(|&n| n <= MAX_GENERATED_INPUTS)
            .ok_or_else(|| CircuitError::Generator(format!("k^(d+1) exceeds {MAX_GENERATED_INPUTS}")))?;
    }
    if n_inputs > MAX_GENERATED_INPUTS {
        return Err(CircuitError::Generator(format!("k^(d+1) exceeds {MAX_GENERATED_INPUTS}")));
    }
    let leaf_gates = n_inputs / k;
    let n_gates: usize = (0..=d).map(|l| k.pow(l as u32)).sum();
    let first_leaf = n_gates - leaf_gates;

    let gates = (0..n_gates)
        .map(|j| {
            let children = if j < first_leaf {
                (1..=k).map(|c| ChildRef::Gate(k * j + c)).collect()
            } else {
                let base = (j - first_leaf) * k;
                (0..k).map(|c| ChildRef::Input(base + c)).collect()
            };
            GateNode::new(j, kind.clone(), children)
        })
        .collect();
    GateTree::new(gates, 0, n_inputs, k)
}

/// Chain of `m` two-input gates: gate 0 reads inputs 0 and 1, gate `i`
/// reads gate `i-1` and input `i+1`. The root is gate `m-1`.
pub fn gen_line(m: usize, kind: GateKind) -> Result<GateTree, CircuitError> {
    if m == 0 {
        return Err(CircuitError::Generator("line needs at least one gate".into()));
    }
    if m + 1 > MAX_GENERATED_INPUTS {
        return Err(CircuitError::Generator(format!("more than {MAX_GENERATED_INPUTS} inputs")));
    }
    let gates = (0..m)
        .map(|i| {
            let children = if i == 0 {
                vec![ChildRef::Input(0), ChildRef::Input(1)]
            } else {
                vec![ChildRef::Gate(i - 1), ChildRef::Input(i + 1)]
            };
            GateNode::new(i, kind.clone(), children)
        })
        .collect();
    GateTree::new(gates, m - 1, m + 1, 2)
}

#[derive(Debug, Clone)]
pub struct RandomTreeConfig {
    pub n_gates: usize,
    pub k_max: usize,
    /// Gate kinds drawn uniformly per gate.
    pub kinds: Vec<GateKind>,
    /// Probability that an input child reuses an already-used input index.
    pub fan_out: f64,
}

impl RandomTreeConfig {
    pub fn new(n_gates: usize, k_max: usize) -> Self {
        RandomTreeConfig {
            n_gates,
            k_max,
            kinds: vec![GateKind::And, GateKind::Or, GateKind::Nand, GateKind::Nor, GateKind::Xor],
            fan_out: 0.0,
        }
    }
}

/// Random formula. Each new gate hangs off a uniformly chosen earlier gate
/// with spare capacity; remaining slots are filled with inputs.
pub fn gen_random<R: Rng + ?Sized>(cfg: &RandomTreeConfig, rng: &mut R) -> Result<GateTree, CircuitError> {
    if cfg.n_gates == 0 || cfg.k_max == 0 || cfg.kinds.is_empty() {
        return Err(CircuitError::Generator("need at least one gate, arity and kind".into()));
    }
    let mut gate_children: Vec<Vec<usize>> = vec![Vec::new(); cfg.n_gates];
    for g in 1..cfg.n_gates {
        let open: Vec<usize> = (0..g).filter(|&p| gate_children[p].len() < cfg.k_max).collect();
        let p = open[rng.gen_range(0..open.len())];
        gate_children[p].push(g);
    }
    let mut n_inputs = 0usize;
    let mut gates = Vec::with_capacity(cfg.n_gates);
    for (g, kids) in gate_children.iter().enumerate() {
        let spare = cfg.k_max - kids.len();
        let min_inputs = usize::from(kids.is_empty());
        let n_in = if spare == 0 { 0 } else { rng.gen_range(min_inputs..=spare) };
        let mut children: Vec<ChildRef> = kids.iter().map(|&c| ChildRef::Gate(c)).collect();
        for _ in 0..n_in {
            let input = if n_inputs > 0 && rng.gen_bool(cfg.fan_out.clamp(0.0, 1.0)) {
                rng.gen_range(0..n_inputs)
            } else {
                n_inputs += 1;
                n_inputs - 1
            };
            children.push(ChildRef::Input(input));
        }
        // Shuffle so gate children are not always first.
        for i in (1..children.len()).rev() {
            let j = rng.gen_range(0..=i);
            children.swap(i, j);
        }
        let kind = cfg.kinds[rng.gen_range(0..cfg.kinds.len())].clone();
        let kind = match kind {
            GateKind::TruthTable(_) => GateKind::TruthTable((0..1usize << children.len()).map(|_| rng.gen()).collect()),
            named => named,
        };
        gates.push(GateNode::new(g, kind, children));
    }
    GateTree::new(gates, 0, n_inputs, cfg.k_max)
}
