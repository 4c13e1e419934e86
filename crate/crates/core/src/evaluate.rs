// SPDX-License-Identifier: Apache-2.0

//! Exact reliability of small formulas under independent gate noise.
//!
//! Input patterns are integers: bit `i` of the pattern is input `x_i`.
//! Gate `g` flips its output with probability `eps[g]`, independently of
//! every other gate.

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{ChildRef, GateTree};
use crate::info::{binary_entropy, mutual_information};

/// Widest input pattern swept exhaustively.
pub const MAX_SWEEP_INPUTS: usize = 20;
/// Largest circuit the flip-pattern oracle accepts.
pub const MAX_BRUTEFORCE_GATES: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("input pattern has {got} bits, circuit has {expected} inputs")]
    PatternWidth { got: usize, expected: usize },
    #[error("{what} is {size}, limit is {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },
    #[error("got {got} failure probabilities for {expected} gates")]
    EpsLength { got: usize, expected: usize },
    #[error("gate {gate}: failure probability {eps} outside [0, 1]")]
    EpsDomain { gate: usize, eps: f64 },
    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),
    #[error("input {0} does not exist")]
    UnknownInput(usize),
}

fn check_eps(tree: &GateTree, eps: &[f64]) -> Result<(), EvalError> {
    if eps.len() != tree.len() {
        return Err(EvalError::EpsLength { got: eps.len(), expected: tree.len() });
    }
    for (gate, &e) in eps.iter().enumerate() {
        if !(0.0..=1.0).contains(&e) {
            return Err(EvalError::EpsDomain { gate, eps: e });
        }
    }
    Ok(())
}

fn check_pattern(tree: &GateTree, x: &[bool]) -> Result<(), EvalError> {
    if x.len() != tree.n_inputs() {
        return Err(EvalError::PatternWidth { got: x.len(), expected: tree.n_inputs() });
    }
    Ok(())
}

pub fn pattern_bits(pattern: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (pattern >> i) & 1 == 1).collect()
}

/// Output of the circuit with gate `g` additionally inverted when
/// `flips(g)` holds.
fn deterministic(tree: &GateTree, x: &[bool], flips: impl Fn(usize) -> bool) -> bool {
    let mut value = vec![false; tree.len()];
    let mut bits = Vec::with_capacity(tree.k_max());
    for &g in tree.postorder() {
        bits.clear();
        for c in &tree.gate(g).children {
            bits.push(match *c {
                ChildRef::Gate(h) => value[h],
                ChildRef::Input(i) => x[i],
                ChildRef::Const(b) => b,
            });
        }
        value[g] = tree.gate(g).kind.eval(&bits) ^ flips(g);
    }
    value[tree.root()]
}

/// Noiseless circuit output `F(x)`.
pub fn noiseless_output(tree: &GateTree, x: &[bool]) -> Result<bool, EvalError> {
    check_pattern(tree, x)?;
    Ok(deterministic(tree, x, |_| false))
}

/// Probability that the noisy output is 1.
pub fn output_prob_one(tree: &GateTree, eps: &[f64], x: &[bool]) -> Result<f64, EvalError> {
    check_eps(tree, eps)?;
    check_pattern(tree, x)?;
    let mut p = vec![0.0_f64; tree.len()];
    let mut probs = Vec::with_capacity(tree.k_max());
    for &g in tree.postorder() {
        probs.clear();
        for c in &tree.gate(g).children {
            probs.push(match *c {
                ChildRef::Gate(h) => p[h],
                ChildRef::Input(i) => f64::from(u8::from(x[i])),
                ChildRef::Const(b) => f64::from(u8::from(b)),
            });
        }
        let pre = tree.gate(g).kind.prob_one(&probs);
        p[g] = pre * (1.0 - eps[g]) + (1.0 - pre) * eps[g];
    }
    Ok(p[tree.root()])
}

/// `P(y != F(x))`, propagating wire distributions bottom-up.
pub fn eval_exact(tree: &GateTree, eps: &[f64], x: &[bool]) -> Result<f64, EvalError> {
    let p_one = output_prob_one(tree, eps, x)?;
    let truth = deterministic(tree, x, |_| false);
    Ok(if truth { 1.0 - p_one } else { p_one })
}

/// Same quantity as [`eval_exact`], by summing over all flip patterns.
pub fn eval_bruteforce(tree: &GateTree, eps: &[f64], x: &[bool]) -> Result<f64, EvalError> {
    check_eps(tree, eps)?;
    check_pattern(tree, x)?;
    if tree.len() > MAX_BRUTEFORCE_GATES {
        return Err(EvalError::TooLarge { what: "gate count", size: tree.len(), cap: MAX_BRUTEFORCE_GATES });
    }
    let truth = deterministic(tree, x, |_| false);
    let mut total = 0.0;
    for flips in 0u64..1 << tree.len() {
        let weight: f64 = (0..tree.len()).map(|g| if (flips >> g) & 1 == 1 { eps[g] } else { 1.0 - eps[g] }).product();
        if weight == 0.0 {
            continue;
        }
        if deterministic(tree, x, |g| (flips >> g) & 1 == 1) != truth {
            total += weight;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    /// Error probability for each input pattern, indexed by pattern.
    pub per_input_error: Vec<f64>,
    pub worst_delta: f64,
    /// `H(E | X_1..X_n)` in bits, inputs uniform.
    pub cond_error_entropy: f64,
    /// `(1 - prod_g (1 - 2 eps_g)) / 2`, set when every gate is XOR.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity_closed_form: Option<f64>,
}

pub fn eval_report(tree: &GateTree, eps: &[f64]) -> Result<EvalReport, EvalError> {
    check_eps(tree, eps)?;
    let n = tree.n_inputs();
    if n > MAX_SWEEP_INPUTS {
        return Err(EvalError::TooLarge { what: "input count", size: n, cap: MAX_SWEEP_INPUTS });
    }
    let per_input_error = (0u64..1 << n)
        .map(|pattern| eval_exact(tree, eps, &pattern_bits(pattern, n)))
        .collect::<Result<Vec<_>, _>>()?;
    let worst_delta = per_input_error.iter().copied().fold(0.0, f64::max);
    let cond_error_entropy =
        per_input_error.iter().map(|&p| binary_entropy(p)).sum::<f64>() / per_input_error.len() as f64;
    let parity_closed_form = tree.all_xor().then(|| 0.5 * (1.0 - eps.iter().map(|e| 1.0 - 2.0 * e).product::<f64>()));
    Ok(EvalReport { per_input_error, worst_delta, cond_error_entropy, parity_closed_form })
}

/// One row of the Fano / strong-data-processing chain for input `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoAudit {
    pub input: usize,
    /// Pattern of the other inputs (bit `i` cleared) under which the
    /// output depends on `x_i`.
    pub configuration: u64,
    /// `I(X_i; Y)` in bits with `X_i` uniform.
    pub mutual_information: f64,
    /// Error probability of reading `x_i` off the output, averaged over
    /// both values of `x_i`.
    pub p_error: f64,
    pub fano_lhs: f64,
    /// Sum over the gates reading `x_i` of `prod_{g on path} (1 - 2 eps_g)^2`.
    pub sdpi_rhs: f64,
    pub fano_ok: bool,
    pub sdpi_ok: bool,
}

impl InfoAudit {
    pub fn passed(&self) -> bool {
        self.fano_ok && self.sdpi_ok
    }
}

const AUDIT_SLACK: f64 = 1e-12;

/// Configurations of the other inputs under which flipping `x_i` flips
/// the noiseless output, in increasing pattern order.
pub fn sensitizing_configurations(tree: &GateTree, i: usize) -> Result<Vec<u64>, EvalError> {
    let n = tree.n_inputs();
    if i >= n {
        return Err(EvalError::UnknownInput(i));
    }
    if n > MAX_SWEEP_INPUTS {
        return Err(EvalError::TooLarge { what: "input count", size: n, cap: MAX_SWEEP_INPUTS });
    }
    let mut found = Vec::new();
    for pattern in 0u64..1 << n {
        if (pattern >> i) & 1 == 1 {
            continue;
        }
        let x0 = pattern_bits(pattern, n);
        let x1 = pattern_bits(pattern | 1 << i, n);
        if deterministic(tree, &x0, |_| false) != deterministic(tree, &x1, |_| false) {
            found.push(pattern);
        }
    }
    Ok(found)
}

/// Audit at a given sensitizing configuration.
pub fn info_audit_at(tree: &GateTree, eps: &[f64], i: usize, configuration: u64) -> Result<InfoAudit, EvalError> {
    check_eps(tree, eps)?;
    let n = tree.n_inputs();
    if i >= n {
        return Err(EvalError::UnknownInput(i));
    }
    let base = configuration & !(1 << i);
    let x0 = pattern_bits(base, n);
    let x1 = pattern_bits(base | 1 << i, n);
    let q0 = output_prob_one(tree, eps, &x0)?;
    let q1 = output_prob_one(tree, eps, &x1)?;
    let joint = [[0.5 * (1.0 - q0), 0.5 * q0], [0.5 * (1.0 - q1), 0.5 * q1]];
    let mutual_information = mutual_information(&joint);
    let p_error = 0.5 * (eval_exact(tree, eps, &x0)? + eval_exact(tree, eps, &x1)?);
    let fano_lhs = 1.0 - binary_entropy(p_error);

    let mut sdpi_rhs = 0.0;
    for g in tree.gates_reading_input(i) {
        sdpi_rhs += tree.path_to_root(g).iter().map(|&h| (1.0 - 2.0 * eps[h]).powi(2)).product::<f64>();
    }
    Ok(InfoAudit {
        input: i,
        configuration: base,
        mutual_information,
        p_error,
        fano_lhs,
        sdpi_rhs,
        fano_ok: fano_lhs <= mutual_information + AUDIT_SLACK,
        sdpi_ok: mutual_information <= sdpi_rhs + AUDIT_SLACK,
    })
}

/// Audit at the first sensitizing configuration of input `i`; `None` when
/// the circuit does not depend on `x_i`.
pub fn info_audit(tree: &GateTree, eps: &[f64], i: usize) -> Result<Option<InfoAudit>, EvalError> {
    match sensitizing_configurations(tree, i)?.first() {
        Some(&c) => info_audit_at(tree, eps, i, c).map(Some),
        None => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdpiCheck {
    /// `I(Z; U')` with `U'` the flipped copy of `U`.
    pub lhs: f64,
    /// `(1 - 2 eps)^2 I(Z; U)`.
    pub rhs: f64,
    pub pass: bool,
}

/// Both sides of the strong data processing inequality for a binary
/// symmetric channel of crossover `eps` applied to `U` in `joint[z][u]`.
pub fn sdpi_check(joint: &[[f64; 2]; 2], eps: f64) -> Result<SdpiCheck, EvalError> {
    if joint.iter().flatten().any(|&p| p.is_nan() || p < 0.0) {
        return Err(EvalError::InvalidJoint("negative or NaN mass".into()));
    }
    let mass: f64 = joint.iter().flatten().sum();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(EvalError::InvalidJoint(format!("total mass {mass}")));
    }
    if !(0.0..=0.5).contains(&eps) {
        return Err(EvalError::InvalidJoint(format!("crossover {eps} outside [0, 0.5]")));
    }
    let mut noisy = [[0.0; 2]; 2];
    for z in 0..2 {
        for u in 0..2 {
            noisy[z][u] = joint[z][u] * (1.0 - eps) + joint[z][1 - u] * eps;
        }
    }
    let lhs = mutual_information(&noisy);
    let rhs = (1.0 - 2.0 * eps).powi(2) * mutual_information(joint);
    Ok(SdpiCheck { lhs, rhs, pass: lhs <= rhs + AUDIT_SLACK })
}
