// SPDX-License-Identifier: Apache-2.0

//! Minimum-energy solver.
//!
//! Each internal gate `g` carries `t_g`, the common path sum of the subtrees
//! hanging below it (leaf gates have `t = 0`, the root's parent has
//! `t = gamma`). Then `eps_g = t_parent(g) - t_g` and every maximal path sums
//! to `gamma` by construction. What remains is the unconstrained convex
//! problem `min_t sum_g psi(eps_g)`, whose stationarity conditions are the
//! child-sum equations. It is solved by damped Newton; the Hessian is
//! tree-structured, so each step is an exact O(|V|) elimination.

use serde::Serialize;

use super::{child_sum_residual, AllocError, Allocation, MAX_ITERATIONS};
use crate::circuit::GateTree;
use crate::efmodel::EnergyFailureModel;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    /// Objective evaluations spent in line searches.
    pub line_search_evals: usize,
    /// Gate visits across all passes over the tree.
    pub node_visits: usize,
}

struct Problem<'a> {
    tree: &'a GateTree,
    model: &'a EnergyFailureModel,
    gamma: f64,
    parent: Vec<Option<usize>>,
    internal: Vec<bool>,
}

impl Problem<'_> {
    fn t_parent(&self, t: &[f64], g: usize) -> f64 {
        self.parent[g].map_or(self.gamma, |p| t[p])
    }

    fn eps(&self, t: &[f64], out: &mut [f64]) -> bool {
        let mut ok = true;
        for g in 0..t.len() {
            let e = self.t_parent(t, g) - t[g];
            ok &= e > 0.0 && e <= self.model.eps0();
            out[g] = e;
        }
        ok
    }

    fn objective(&self, eps: &[f64]) -> f64 {
        eps.iter().map(|&e| self.model.psi(e).unwrap_or(f64::INFINITY)).sum()
    }
}

pub(super) fn solve(
    tree: &GateTree,
    model: &EnergyFailureModel,
    gamma: f64,
    eta: f64,
) -> Result<(Vec<f64>, SolveStats), AllocError> {
    let n = tree.len();
    let mut stats = SolveStats::default();
    let internal: Vec<bool> = tree.gates().iter().map(|g| !g.is_leaf()).collect();
    let parent: Vec<Option<usize>> = (0..n).map(|g| tree.parent(g)).collect();
    let prob = Problem { tree, model, gamma, parent, internal };

    // Start from path sums proportional to subtree height.
    let mut height = vec![0usize; n];
    for &g in tree.postorder() {
        height[g] = 1 + tree.gate(g).gate_children().map(|c| height[c]).max().unwrap_or(0);
    }
    let root_height = height[tree.root()] as f64;
    let mut t: Vec<f64> = (0..n).map(|g| gamma * (height[g] - 1) as f64 / root_height).collect();

    let mut eps = vec![0.0; n];
    prob.eps(&t, &mut eps);
    if !prob.internal.iter().any(|&b| b) {
        return Ok((eps, stats));
    }
    let mut phi = prob.objective(&eps);

    let mut grad = vec![0.0; n];
    let mut d_tilde = vec![0.0; n];
    let mut r_tilde = vec![0.0; n];
    let mut step = vec![0.0; n];
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    let mut trial_t = vec![0.0; n];
    let mut trial_eps = vec![0.0; n];

    let mut residual = child_sum_residual(prob.tree, model, &eps)?;
    while stats.iterations < MAX_ITERATIONS {
        if residual <= 1e-2 * eta {
            return Ok((eps, stats));
        }
        stats.iterations += 1;
        stats.node_visits += 2 * n;
        for g in 0..n {
            d1[g] = model.psi_prime(eps[g])?;
            d2[g] = model.psi_second(eps[g])?;
        }
        // Gradient and Hessian elimination, children before parents.
        for &g in tree.postorder() {
            if !prob.internal[g] {
                continue;
            }
            let mut gr = -d1[g];
            let mut dt = d2[g];
            for l in tree.gate(g).gate_children() {
                gr += d1[l];
                dt += d2[l];
            }
            grad[g] = gr;
            let mut rt = -gr;
            for l in tree.gate(g).gate_children() {
                if prob.internal[l] {
                    dt -= d2[l] * d2[l] / d_tilde[l];
                    rt += d2[l] * r_tilde[l] / d_tilde[l];
                }
            }
            d_tilde[g] = dt;
            r_tilde[g] = rt;
        }
        for &g in tree.postorder().iter().rev() {
            if !prob.internal[g] {
                step[g] = 0.0;
                continue;
            }
            step[g] = match prob.parent[g] {
                Some(p) => (r_tilde[g] + d2[g] * step[p]) / d_tilde[g],
                None => r_tilde[g] / d_tilde[g],
            };
        }
        let slope: f64 = (0..n).filter(|&g| prob.internal[g]).map(|g| grad[g] * step[g]).sum();

        let mut alpha = 1.0;
        let mut accepted = false;
        let mut trial_residual = f64::INFINITY;
        while alpha > 1e-14 {
            for g in 0..n {
                trial_t[g] = t[g] + alpha * step[g];
            }
            stats.line_search_evals += 1;
            stats.node_visits += n;
            if prob.eps(&trial_t, &mut trial_eps) {
                let trial_phi = prob.objective(&trial_eps);
                trial_residual = child_sum_residual(prob.tree, model, &trial_eps)?;
                // Near the optimum the objective stops resolving progress, so a
                // smaller stationarity residual also counts.
                if trial_phi <= phi + 1e-4 * alpha * slope || trial_residual < residual {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        std::mem::swap(&mut t, &mut trial_t);
        std::mem::swap(&mut eps, &mut trial_eps);
        phi = prob.objective(&eps);
        residual = trial_residual;
    }
    if residual <= eta {
        return Ok((eps, stats));
    }
    let best = Allocation::from_eps(model, eps)?;
    Err(AllocError::NonConvergence { iterations: stats.iterations, residual, best: Box::new(best) })
}
