// SPDX-License-Identifier: Apache-2.0

//! Lower bounds on the total energy of a formula whose gates all run at a
//! common failure probability.
//!
//! A circuit is δ-reliable when every input bit reaches the output with
//! error probability at most δ. Through the strong data processing
//! inequality this forces `sum_{g in P_i} eps_g <= gamma(delta)` along the
//! path `P_i` of every input, with `gamma(delta) = ln(1 / (1 - h(delta))) / 4`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::GateTree;
use crate::efmodel::{EnergyFailureModel, Family, ModelError};
use crate::info::binary_entropy;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("delta must lie in [0, 0.5), got {0}")]
    DeltaDomain(f64),
    #[error("gamma must be finite and non-negative, got {0}")]
    GammaDomain(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The triple `(delta, h(delta), gamma(delta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReliabilityTarget {
    pub delta: f64,
    pub h_delta: f64,
    pub gamma: f64,
}

/// `ln(1 / (1 - h)) / 4`, written to stay accurate for small `h`.
fn gamma_of_h(h: f64) -> f64 {
    -0.25 * (-h).ln_1p()
}

pub fn make_target(delta: f64) -> Result<ReliabilityTarget, BoundsError> {
    if !(0.0..0.5).contains(&delta) {
        return Err(BoundsError::DeltaDomain(delta));
    }
    let h_delta = binary_entropy(delta);
    Ok(ReliabilityTarget { delta, h_delta, gamma: gamma_of_h(h_delta) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaInverse {
    pub delta: f64,
    /// `gamma` was too large to resolve; `delta` is pinned just below 1/2.
    pub saturated: bool,
}

pub const SATURATED_DELTA: f64 = 0.5 - 1e-12;

/// Solves `gamma(delta) = y` for `delta` in [0, 1/2).
pub fn gamma_inverse(y: f64) -> Result<GammaInverse, BoundsError> {
    if !(y.is_finite() && y >= 0.0) {
        return Err(BoundsError::GammaDomain(y));
    }
    if y == 0.0 {
        return Ok(GammaInverse { delta: 0.0, saturated: false });
    }
    let h_target = -(-4.0 * y).exp_m1();
    if h_target >= 1.0 {
        return Ok(GammaInverse { delta: SATURATED_DELTA, saturated: true });
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = 0.5 * (lo + hi);
    if delta >= SATURATED_DELTA {
        return Ok(GammaInverse { delta: SATURATED_DELTA, saturated: true });
    }
    Ok(GammaInverse { delta, saturated: false })
}

impl ReliabilityTarget {
    pub fn from_gamma(y: f64) -> Result<(Self, bool), BoundsError> {
        let inv = gamma_inverse(y)?;
        let h_delta = binary_entropy(inv.delta);
        Ok((ReliabilityTarget { delta: inv.delta, h_delta, gamma: y }, inv.saturated))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    GraphSpecific,
    Theorem1,
    Corollary1ClosedForm,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::GraphSpecific => "graph_specific",
            BoundKind::Theorem1 => "theorem1",
            BoundKind::Corollary1ClosedForm => "corollary1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFlag {
    Finite,
    /// Perfect reliability was asked for.
    Infinite,
    /// The per-gate constraint is looser than `eps0`, so it costs nothing.
    VacuousZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_energy: f64,
    pub kind: BoundKind,
    pub flag: BoundFlag,
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_gates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_path: Option<usize>,
    /// Per-gate failure probability the bound is evaluated at, when one exists.
    pub argument: f64,
    pub model: EnergyFailureModel,
    pub target: ReliabilityTarget,
}

impl BoundReport {
    pub fn per_input(&self) -> f64 {
        self.bound_energy / self.n as f64
    }
}

/// `count * psi(arg)` with the zero and infinity flags applied.
fn scaled_psi(model: &EnergyFailureModel, count: f64, arg: f64) -> Result<(f64, BoundFlag), BoundsError> {
    if arg <= 0.0 {
        Ok((f64::INFINITY, BoundFlag::Infinite))
    } else if arg > model.eps0() {
        Ok((0.0, BoundFlag::VacuousZero))
    } else {
        Ok((count * model.psi(arg)?, BoundFlag::Finite))
    }
}

/// `|V_g| * psi(gamma / max_i |P_i|)` for a specific formula.
pub fn bound_graph_specific(
    tree: &GateTree,
    model: &EnergyFailureModel,
    target: &ReliabilityTarget,
) -> Result<BoundReport, BoundsError> {
    let max_path = tree.max_input_path_len();
    let arg = target.gamma / max_path as f64;
    let (bound_energy, flag) = scaled_psi(model, tree.len() as f64, arg)?;
    Ok(BoundReport {
        bound_energy,
        kind: BoundKind::GraphSpecific,
        flag,
        n: tree.n_inputs(),
        k: tree.k_max(),
        n_gates: Some(tree.len()),
        max_path: Some(max_path),
        argument: arg,
        model: *model,
        target: *target,
    })
}

fn check_nk(n: usize, k: usize) -> Result<(), BoundsError> {
    if k < 2 || k >= n {
        return Err(BoundsError::Precondition(format!("need 2 <= k < n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// `(n / k) * psi(gamma * ln k / ln n)`: holds for every formula computing
/// an n-input function that depends on all its inputs, with fan-in at most k.
pub fn bound_theorem1(
    n: usize,
    k: usize,
    model: &EnergyFailureModel,
    target: &ReliabilityTarget,
) -> Result<BoundReport, BoundsError> {
    check_nk(n, k)?;
    let (nf, kf) = (n as f64, k as f64);
    let arg = target.gamma * kf.ln() / nf.ln();
    let (bound_energy, flag) = scaled_psi(model, nf / kf, arg)?;
    Ok(BoundReport {
        bound_energy,
        kind: BoundKind::Theorem1,
        flag,
        n,
        k,
        n_gates: None,
        max_path: None,
        argument: arg,
        model: *model,
        target: *target,
    })
}

/// Closed forms of the function-agnostic bound, as commonly written for the
/// stretched exponential and polynomial families. The polynomial form drops
/// the `-1` of `psi`; with `beta = 1` it exceeds [`bound_theorem1`] by `n / k`.
pub fn bound_corollary1(
    n: usize,
    k: usize,
    model: &EnergyFailureModel,
    target: &ReliabilityTarget,
) -> Result<BoundReport, BoundsError> {
    check_nk(n, k)?;
    let (nf, kf) = (n as f64, k as f64);
    let inv_beta = 1.0 / model.beta();
    // ln(1 / (1 - h(delta)))
    let log_term = 4.0 * target.gamma;
    let arg = target.gamma * kf.ln() / nf.ln();
    let (bound_energy, flag) = if log_term <= 0.0 {
        (f64::INFINITY, BoundFlag::Infinite)
    } else {
        match model.family() {
            Family::Exponential | Family::StretchedExponential => {
                let inner = (4.0 * model.eps0() * nf.ln() / kf.ln()).ln() - log_term.ln();
                if inner <= 0.0 {
                    (0.0, BoundFlag::VacuousZero)
                } else {
                    (nf / (kf * model.c().powf(inv_beta)) * inner.powf(inv_beta), BoundFlag::Finite)
                }
            }
            Family::Polynomial => {
                let base = 4.0 * model.eps0() * nf.ln() / (kf.ln() * log_term);
                (nf / kf * base.powf(inv_beta), BoundFlag::Finite)
            }
        }
    };
    Ok(BoundReport {
        bound_energy,
        kind: BoundKind::Corollary1ClosedForm,
        flag,
        n,
        k,
        n_gates: None,
        max_path: None,
        argument: arg,
        model: *model,
        target: *target,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub bound: f64,
    pub bound_per_input: f64,
    pub flag: BoundFlag,
}

/// Function-agnostic bound and bound per input for each `n`.
pub fn scaling_table(
    model: &EnergyFailureModel,
    k: usize,
    target: &ReliabilityTarget,
    n_list: &[usize],
) -> Result<Vec<ScalingRow>, BoundsError> {
    n_list
        .iter()
        .map(|&n| {
            let r = bound_theorem1(n, k, model, target)?;
            Ok(ScalingRow { n, bound: r.bound_energy, bound_per_input: r.per_input(), flag: r.flag })
        })
        .collect()
}
