// SPDX-License-Identifier: Apache-2.0

//! Non-uniform energy allocation over the gates of a formula.
//!
//! Two dual problems are solved:
//!
//! * minimum energy: minimize `sum_g psi(eps_g)` subject to
//!   `sum_{g in P} eps_g <= gamma` on every maximal path `P`;
//! * maximum reliability: the smallest `gamma` reachable with a total
//!   energy budget `E`.
//!
//! The optimum is characterized by two conditions. Every maximal path sum
//! equals `gamma`, and at every internal gate
//! `psi'(eps_g) = sum_l psi'(eps_l)` over its gate children. [`certify_kkt`]
//! measures how well an allocation meets them.
//!
//! These are necessary conditions for δ-reliability, so allocations are
//! lower-bound certificates and candidate operating points, not reliability
//! guarantees.

mod newton;
mod oracle;
mod rule;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{gamma_inverse, BoundsError};
use crate::circuit::GateTree;
use crate::efmodel::{EnergyFailureModel, ModelError};

pub use newton::SolveStats;
pub use oracle::{oracle_min_energy, ORACLE_MAX_GATES};
pub use rule::{
    closed_form_symmetric, power_rule_alloc, power_rule_exponent, printed_poly_exponent, ClosedFormMode,
    SymmetricSolution,
};

pub const DEFAULT_ETA: f64 = 1e-8;
pub const DEFAULT_THETA: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocError {
    #[error("gamma = {gamma} must lie in (0, eps0 = {eps0}]; larger values leave some gate unconstrained")]
    GammaDomain { gamma: f64, eps0: f64 },
    #[error("tolerance must lie in (0, 1e-2], got {0}")]
    Tolerance(f64),
    #[error("energy budget must be positive, got {0}")]
    BudgetDomain(f64),
    #[error("budget {budget} is below the threshold energy {eth}")]
    BelowThreshold { budget: f64, eth: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64, best: Box<Allocation> },
    #[error("closed forms need the exponential or polynomial family")]
    UnsupportedFamily,
    #[error("level {level} gets eps = {eps}, outside (0, eps0]")]
    LevelOutOfRange { level: usize, eps: f64 },
    #[error("oracle handles at most {cap} gates, got {gates}")]
    TooLarge { gates: usize, cap: usize },
    #[error("power-rule exponent must be finite and non-zero, got {0}")]
    Exponent(f64),
    #[error("allocation has {got} gates, circuit has {expected}")]
    Dimension { got: usize, expected: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Per-gate failure probabilities and the energies they cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub eps: Vec<f64>,
    pub energy: Vec<f64>,
    pub total_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateAllocation {
    pub id: usize,
    pub eps: f64,
    pub energy: f64,
}

impl Allocation {
    pub fn from_eps(model: &EnergyFailureModel, eps: Vec<f64>) -> Result<Self, ModelError> {
        let energy = eps.iter().map(|&e| model.psi(e)).collect::<Result<Vec<_>, _>>()?;
        let total_energy = energy.iter().sum();
        Ok(Allocation { eps, energy, total_energy })
    }

    /// Every gate at the same failure probability.
    pub fn uniform(model: &EnergyFailureModel, n_gates: usize, eps: f64) -> Result<Self, ModelError> {
        Allocation::from_eps(model, vec![eps; n_gates])
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn gates(&self) -> Vec<GateAllocation> {
        self.eps
            .iter()
            .zip(&self.energy)
            .enumerate()
            .map(|(id, (&eps, &energy))| GateAllocation { id, eps, energy })
            .collect()
    }

    /// Sum of `eps` along each maximal path of `tree`.
    pub fn path_sums(&self, tree: &GateTree) -> Vec<f64> {
        tree.maximal_paths().paths.iter().map(|p| p.iter().map(|&g| self.eps[g]).sum()).collect()
    }
}

impl Serialize for Allocation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Allocation", 2)?;
        st.serialize_field("total_energy", &self.total_energy)?;
        st.serialize_field("gates", &self.gates())?;
        st.end()
    }
}

/// Relative residuals of the optimality conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktReport {
    #[serde(rename = "child_sum")]
    pub max_child_sum_residual: f64,
    #[serde(rename = "path_sum")]
    pub max_path_residual: f64,
    #[serde(rename = "budget")]
    pub budget_residual: Option<f64>,
}

impl KktReport {
    /// Child-sum and path-sum residuals within `10 eta`, budget residual
    /// (when present) within `theta`.
    pub fn certified(&self, eta: f64, theta: f64) -> bool {
        let tol = 10.0 * eta;
        self.max_child_sum_residual <= tol
            && self.max_path_residual <= tol
            && self.budget_residual.is_none_or(|b| b <= theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KktTarget {
    /// Path sums should equal `gamma`.
    Gamma(f64),
    /// Path sums should equal `gamma` and the total energy `energy`.
    Budget { energy: f64, gamma: f64 },
}

/// Largest relative child-sum residual over internal gates.
pub fn child_sum_residual(tree: &GateTree, model: &EnergyFailureModel, eps: &[f64]) -> Result<f64, ModelError> {
    let mut worst = 0.0_f64;
    for g in tree.gates() {
        if g.is_leaf() {
            continue;
        }
        let own = model.psi_prime(eps[g.id])?;
        let mut kids = 0.0;
        for l in g.gate_children() {
            kids += model.psi_prime(eps[l])?;
        }
        let r = (own - kids).abs() / own.abs();
        worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
    }
    Ok(worst)
}

pub fn certify_kkt(
    tree: &GateTree,
    model: &EnergyFailureModel,
    alloc: &Allocation,
    target: KktTarget,
) -> Result<KktReport, AllocError> {
    if alloc.len() != tree.len() {
        return Err(AllocError::Dimension { got: alloc.len(), expected: tree.len() });
    }
    let max_child_sum_residual = child_sum_residual(tree, model, &alloc.eps)?;
    let gamma = match target {
        KktTarget::Gamma(g) | KktTarget::Budget { gamma: g, .. } => g,
    };
    let max_path_residual = alloc.path_sums(tree).iter().map(|s| (s - gamma).abs() / gamma).fold(0.0, f64::max);
    let budget_residual = match target {
        KktTarget::Gamma(_) => None,
        KktTarget::Budget { energy, .. } => {
            let spent: f64 = alloc.eps.iter().map(|&e| model.psi(e)).sum::<Result<f64, _>>()?;
            Some((spent - energy).abs() / energy)
        }
    };
    Ok(KktReport { max_child_sum_residual, max_path_residual, budget_residual })
}

fn check_tolerance(t: f64) -> Result<(), AllocError> {
    if t > 0.0 && t <= 1e-2 {
        Ok(())
    } else {
        Err(AllocError::Tolerance(t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinEnergySolution {
    pub allocation: Allocation,
    pub kkt: KktReport,
    pub stats: SolveStats,
}

/// Minimum total energy with every maximal path sum at most `gamma`.
pub fn min_energy_alloc(
    tree: &GateTree,
    model: &EnergyFailureModel,
    gamma: f64,
    eta: f64,
) -> Result<MinEnergySolution, AllocError> {
    check_tolerance(eta)?;
    if !(gamma > 0.0 && gamma <= model.eps0()) {
        return Err(AllocError::GammaDomain { gamma, eps0: model.eps0() });
    }
    let (eps, stats) = newton::solve(tree, model, gamma, eta)?;
    let allocation = Allocation::from_eps(model, eps)?;
    let kkt = certify_kkt(tree, model, &allocation, KktTarget::Gamma(gamma))?;
    Ok(MinEnergySolution { allocation, kkt, stats })
}

/// Smallest budget at which the `eps0` box constraints stop binding:
/// the minimum energy for `gamma = eps0`.
pub fn eth(tree: &GateTree, model: &EnergyFailureModel) -> Result<f64, AllocError> {
    Ok(min_energy_alloc(tree, model, model.eps0(), DEFAULT_ETA)?.allocation.total_energy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxReliabilitySolution {
    pub allocation: Allocation,
    /// Achieved common path sum.
    pub y_min: f64,
    pub delta_min: f64,
    pub saturated: bool,
    pub eth: f64,
    pub kkt: KktReport,
    pub bisection_steps: usize,
}

/// Smallest path sum `gamma` (hence smallest `delta`) reachable with `budget`.
pub fn max_reliability_alloc(
    tree: &GateTree,
    model: &EnergyFailureModel,
    budget: f64,
    theta: f64,
    eta: f64,
) -> Result<MaxReliabilitySolution, AllocError> {
    check_tolerance(theta)?;
    check_tolerance(eta)?;
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(AllocError::BudgetDomain(budget));
    }
    let energy_at = |gamma: f64| min_energy_alloc(tree, model, gamma, eta);
    let top = energy_at(model.eps0())?;
    let eth = top.allocation.total_energy;
    if budget < eth * (1.0 - theta) {
        return Err(AllocError::BelowThreshold { budget, eth });
    }
    let accept = |e: f64| (e - budget).abs() <= 0.5 * theta * budget;

    let finish = |sol: MinEnergySolution, gamma: f64, steps: usize| -> Result<MaxReliabilitySolution, AllocError> {
        let inv = gamma_inverse(gamma)?;
        let kkt = certify_kkt(tree, model, &sol.allocation, KktTarget::Budget { energy: budget, gamma })?;
        Ok(MaxReliabilitySolution {
            allocation: sol.allocation,
            y_min: gamma,
            delta_min: inv.delta,
            saturated: inv.saturated,
            eth,
            kkt,
            bisection_steps: steps,
        })
    };
    if accept(eth) || budget <= eth {
        return finish(top, model.eps0(), 0);
    }

    // Total energy is strictly decreasing in gamma; bracket in log space.
    let mut hi = model.eps0();
    let mut lo = 0.5 * hi;
    let mut steps = 0;
    loop {
        let sol = energy_at(lo)?;
        steps += 1;
        if accept(sol.allocation.total_energy) {
            return finish(sol, lo, steps);
        }
        if sol.allocation.total_energy > budget {
            break;
        }
        hi = lo;
        lo *= 0.5;
        if steps > 4 * MAX_ITERATIONS {
            return Err(AllocError::NonConvergence {
                iterations: steps,
                residual: (sol.allocation.total_energy - budget).abs() / budget,
                best: Box::new(sol.allocation),
            });
        }
    }
    let mut last = None;
    for _ in 0..MAX_ITERATIONS {
        let mid = (lo.ln() + 0.5 * (hi.ln() - lo.ln())).exp();
        let sol = energy_at(mid)?;
        steps += 1;
        let e = sol.allocation.total_energy;
        if accept(e) {
            return finish(sol, mid, steps);
        }
        if e > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        last = Some(sol);
    }
    let best = last.expect("at least one bisection step").allocation;
    Err(AllocError::NonConvergence {
        iterations: steps,
        residual: (best.total_energy - budget).abs() / budget,
        best: Box::new(best),
    })
}
