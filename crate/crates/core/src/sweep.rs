// SPDX-License-Identifier: Apache-2.0

//! Energy-budget sweeps comparing optimized and uniform allocations on the
//! two 4-input shapes: the balanced binary tree of 3 gates and the line of
//! 3 gates.

use serde::Serialize;
use thiserror::Error;

use crate::alloc::{self, max_reliability_alloc, AllocError, Allocation};
use crate::bounds::{gamma_inverse, BoundsError};
use crate::circuit::{gen_balanced, gen_line, CircuitError, GateKind, GateTree};
use crate::efmodel::{EnergyFailureModel, ModelError};
use crate::evaluate::{eval_report, EvalError};
use crate::info::binary_entropy;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("budget grid is empty")]
    EmptyGrid,
    #[error("budget gridpoint {0} must be positive and finite")]
    BadGridpoint(f64),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Alloc(#[from] AllocError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Line,
    Tree,
}

impl Structure {
    pub fn name(self) -> &'static str {
        match self {
            Structure::Line => "line",
            Structure::Tree => "tree",
        }
    }

    pub fn build(self, kind: GateKind) -> Result<GateTree, CircuitError> {
        match self {
            Structure::Tree => gen_balanced(2, 1, kind),
            Structure::Line => gen_line(3, kind),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AllocationKind {
    Heuristic,
    Uniform,
}

impl AllocationKind {
    pub fn name(self) -> &'static str {
        match self {
            AllocationKind::Heuristic => "heuristic",
            AllocationKind::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// Budget below the threshold energy; the optimized allocation is not
    /// defined there and the uniform one is reported instead.
    BelowEth,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::BelowEth => "below_eth",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// Budget in units of `1 / c` (the grid value `cE`).
    pub gridpoint: f64,
    pub budget: f64,
    pub structure: Structure,
    pub gate_kind: String,
    pub allocation_kind: AllocationKind,
    pub status: RowStatus,
    pub total_energy: f64,
    pub energies: Vec<f64>,
    pub eps: Vec<f64>,
    /// Largest maximal-path sum of the allocation.
    pub max_path_sum: f64,
    /// `h(delta)` for the `delta` whose `gamma` equals `max_path_sum`:
    /// no allocation with these path sums can do better in the worst case.
    pub entropy_limit: f64,
    pub worst_delta: f64,
    pub cond_error_entropy: f64,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub model: EnergyFailureModel,
    /// Budgets in units of `1 / c`.
    pub grid: Vec<f64>,
    pub gate_kinds: Vec<GateKind>,
    pub structures: Vec<Structure>,
    pub theta: f64,
    pub eta: f64,
}

impl SweepConfig {
    pub fn new(model: EnergyFailureModel, grid: Vec<f64>, gate_kinds: Vec<GateKind>) -> Self {
        SweepConfig {
            model,
            grid,
            gate_kinds,
            structures: vec![Structure::Line, Structure::Tree],
            theta: alloc::DEFAULT_THETA,
            eta: alloc::DEFAULT_ETA,
        }
    }
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
    }
}

struct Cell<'a> {
    tree: &'a GateTree,
    gridpoint: f64,
    budget: f64,
    structure: Structure,
    gate_kind: &'a GateKind,
}

impl Cell<'_> {
    fn row(
        &self,
        allocation_kind: AllocationKind,
        status: RowStatus,
        allocation: Allocation,
    ) -> Result<SweepRow, SweepError> {
        let report = eval_report(self.tree, &allocation.eps)?;
        let max_path_sum = allocation.path_sums(self.tree).into_iter().fold(0.0, f64::max);
        let entropy_limit = binary_entropy(gamma_inverse(max_path_sum)?.delta);
        Ok(SweepRow {
            gridpoint: self.gridpoint,
            budget: self.budget,
            structure: self.structure,
            gate_kind: self.gate_kind.name(),
            allocation_kind,
            status,
            total_energy: allocation.total_energy,
            energies: allocation.energy,
            eps: allocation.eps,
            max_path_sum,
            entropy_limit,
            worst_delta: report.worst_delta,
            cond_error_entropy: report.cond_error_entropy,
        })
    }
}

/// Runs every (gridpoint, structure, allocation kind, gate kind)
/// combination. Rows come back sorted in that order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    if cfg.grid.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    let model = &cfg.model;
    let mut rows = Vec::new();
    for &gridpoint in &cfg.grid {
        if !(gridpoint > 0.0 && gridpoint.is_finite()) {
            return Err(SweepError::BadGridpoint(gridpoint));
        }
        let budget = gridpoint / model.c();
        for &structure in &cfg.structures {
            for kind in &cfg.gate_kinds {
                let tree = structure.build(kind.clone())?;
                let per_gate = model.chi(budget / tree.len() as f64)?;
                let uniform = Allocation::uniform(model, tree.len(), per_gate)?;
                let (heuristic, status) = match max_reliability_alloc(&tree, model, budget, cfg.theta, cfg.eta) {
                    Ok(sol) => (sol.allocation, RowStatus::Ok),
                    Err(AllocError::BelowThreshold { .. }) => (uniform.clone(), RowStatus::BelowEth),
                    Err(e) => return Err(e.into()),
                };
                let cell = Cell { tree: &tree, gridpoint, budget, structure, gate_kind: kind };
                rows.push(cell.row(AllocationKind::Heuristic, status, heuristic)?);
                rows.push(cell.row(AllocationKind::Uniform, RowStatus::Ok, uniform)?);
            }
        }
    }
    rows.sort_by(|a, b| {
        a.gridpoint
            .total_cmp(&b.gridpoint)
            .then(a.structure.cmp(&b.structure))
            .then(a.allocation_kind.cmp(&b.allocation_kind))
            .then(a.gate_kind.cmp(&b.gate_kind))
    });
    Ok(rows)
}
