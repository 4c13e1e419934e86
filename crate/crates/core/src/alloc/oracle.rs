// SPDX-License-Identifier: Apache-2.0

//! Reference solver for small trees, used to cross-check the fast paths.
//!
//! Works on the dual: one multiplier `nu_P >= 0` per maximal path. Given the
//! multipliers, each gate independently minimizes
//! `psi(eps) + V_g eps` with `V_g = sum_{P containing g} nu_P`, giving
//! `eps_g = psi'^-1(-V_g)`. Coordinate ascent sets one `nu_P` at a time so
//! that its path sum hits `gamma` exactly (or to zero if the path is slack).

use super::{AllocError, Allocation};
use crate::circuit::GateTree;
use crate::efmodel::EnergyFailureModel;

pub const ORACLE_MAX_GATES: usize = 12;

const MAX_SWEEPS: usize = 200_000;

pub fn oracle_min_energy(tree: &GateTree, model: &EnergyFailureModel, gamma: f64) -> Result<Allocation, AllocError> {
    if tree.len() > ORACLE_MAX_GATES {
        return Err(AllocError::TooLarge { gates: tree.len(), cap: ORACLE_MAX_GATES });
    }
    if !(gamma > 0.0 && gamma <= model.eps0()) {
        return Err(AllocError::GammaDomain { gamma, eps0: model.eps0() });
    }
    let paths = tree.maximal_paths().paths;
    let n = tree.len();
    let mut nu = vec![0.0_f64; paths.len()];
    let mut load = vec![0.0_f64; n];

    let eps_of = |v: f64| -> Result<f64, AllocError> { Ok(model.psi_prime_inverse(-v.max(0.0))?) };
    let path_sum = |path: &[usize], load: &[f64], extra: f64| -> Result<f64, AllocError> {
        let mut s = 0.0;
        for &g in path {
            s += eps_of(load[g] + extra)?;
        }
        Ok(s)
    };

    let mut prev_objective = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        for (p, path) in paths.iter().enumerate() {
            for &g in path {
                load[g] -= nu[p];
            }
            let new_nu = if path_sum(path, &load, 0.0)? <= gamma {
                0.0
            } else {
                let mut lo = 0.0_f64;
                let mut hi = nu[p].max(1.0);
                while path_sum(path, &load, hi)? > gamma {
                    lo = hi;
                    hi *= 2.0;
                }
                for _ in 0..300 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if path_sum(path, &load, mid)? > gamma {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            };
            nu[p] = new_nu;
            for &g in path {
                load[g] += nu[p];
            }
        }
        let eps: Vec<f64> = load.iter().map(|&v| eps_of(v)).collect::<Result<_, _>>()?;
        let objective: f64 = eps.iter().map(|&e| model.psi(e)).sum::<Result<f64, _>>()?;
        let worst_violation =
            paths.iter().map(|path| path.iter().map(|&g| eps[g]).sum::<f64>() - gamma).fold(0.0_f64, f64::max);
        if (prev_objective - objective).abs() <= 1e-14 * objective.abs().max(1.0) && worst_violation <= 1e-13 * gamma {
            return Ok(Allocation::from_eps(model, eps)?);
        }
        prev_objective = objective;
    }
    let eps: Vec<f64> = load.iter().map(|&v| eps_of(v)).collect::<Result<_, _>>()?;
    let best = Allocation::from_eps(model, eps)?;
    Err(AllocError::NonConvergence { iterations: MAX_SWEEPS, residual: f64::NAN, best: Box::new(best) })
}
