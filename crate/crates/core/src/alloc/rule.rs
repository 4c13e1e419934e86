// SPDX-License-Identifier: Apache-2.0

//! Exact allocations for the exponential and polynomial families.
//!
//! For both, `psi'(eps)` is a power of `eps` times a constant, so the
//! child-sum condition reads `eps_g = (sum_l eps_l^q)^(1/q)` with a fixed
//! exponent `q` and every subtree solution scales linearly with its path
//! budget. One bottom-up pass computes normalized shapes and one top-down
//! pass distributes `gamma`.

use serde::Serialize;

use super::{AllocError, Allocation};
use crate::circuit::GateTree;
use crate::efmodel::{EnergyFailureModel, Family};

/// Exponent `q` of the child-sum rule implied by the derivative of `psi`:
/// `-1` for the exponential family and `-(1 + 1/beta)` for the polynomial.
pub fn power_rule_exponent(model: &EnergyFailureModel) -> Result<f64, AllocError> {
    match model.family() {
        Family::Exponential => Ok(-1.0),
        Family::Polynomial => Ok(-(1.0 + 1.0 / model.beta())),
        Family::StretchedExponential => Err(AllocError::UnsupportedFamily),
    }
}

/// Exponent that reproduces the per-level ratio `k^(beta / (1 - beta))`
/// sometimes quoted for the polynomial family. Undefined for `beta = 1`.
pub fn printed_poly_exponent(beta: f64) -> Result<f64, AllocError> {
    let q = 1.0 / beta - 1.0;
    if q == 0.0 || !q.is_finite() {
        return Err(AllocError::Exponent(q));
    }
    Ok(q)
}

/// Allocation obeying `eps_g = (sum_l eps_l^q)^(1/q)` at every internal gate
/// with all maximal path sums equal to `gamma`.
pub fn power_rule_alloc(tree: &GateTree, gamma: f64, q: f64) -> Result<Vec<f64>, AllocError> {
    if q == 0.0 || !q.is_finite() {
        return Err(AllocError::Exponent(q));
    }
    let n = tree.len();
    let mut shape = vec![0.0_f64; n];
    for &g in tree.postorder() {
        let node = tree.gate(g);
        if node.is_leaf() {
            shape[g] = 1.0;
        } else {
            let r = node.gate_children().map(|l| shape[l].powf(q)).sum::<f64>().powf(1.0 / q);
            shape[g] = r / (1.0 + r);
        }
    }
    let mut budget = vec![0.0_f64; n];
    let mut eps = vec![0.0_f64; n];
    for &g in tree.postorder().iter().rev() {
        let s = tree.parent(g).map_or(gamma, |p| budget[p]);
        eps[g] = s * shape[g];
        budget[g] = s - eps[g];
    }
    Ok(eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormMode {
    MinEnergy { gamma: f64 },
    MaxReliability { budget: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricSolution {
    /// Failure probability per level, root (level 0) first.
    pub eps_levels: Vec<f64>,
    /// Common path sum.
    pub gamma: f64,
    pub total_energy: f64,
    /// Ratio `eps(i) / eps(i + 1)` between consecutive levels.
    pub level_ratio: f64,
    /// The alternative polynomial ratio `k^(beta / (1 - beta))`, for comparison.
    pub printed_ratio: Option<f64>,
}

impl SymmetricSolution {
    /// Expands the level values onto a breadth-first balanced tree.
    pub fn to_allocation(&self, model: &EnergyFailureModel, tree: &GateTree) -> Result<Allocation, AllocError> {
        let eps = (0..tree.len()).map(|g| self.eps_levels[tree.level(g)]).collect();
        Ok(Allocation::from_eps(model, eps)?)
    }
}

/// Level-wise optimum on the full `k`-ary tree of depth `d`.
pub fn closed_form_symmetric(
    k: usize,
    d: usize,
    model: &EnergyFailureModel,
    mode: ClosedFormMode,
) -> Result<SymmetricSolution, AllocError> {
    if k == 0 {
        return Err(AllocError::Exponent(0.0));
    }
    let kf = k as f64;
    let a = model.eps0();
    let beta = model.beta();
    let (ratio, printed_ratio) = match model.family() {
        Family::Exponential => (1.0 / kf, None),
        Family::Polynomial => {
            let printed = if beta == 1.0 { None } else { Some(kf.powf(beta / (1.0 - beta))) };
            (kf.powf(-beta / (1.0 + beta)), printed)
        }
        Family::StretchedExponential => return Err(AllocError::UnsupportedFamily),
    };
    // eps(i) = eps(d) * ratio^(d - i); count(i) = k^i gates at level i.
    let count = |i: usize| kf.powi(i as i32);
    let rel = |i: usize| ratio.powi((d - i) as i32);
    let eps_d = match mode {
        ClosedFormMode::MinEnergy { gamma } => gamma / (0..=d).map(rel).sum::<f64>(),
        ClosedFormMode::MaxReliability { budget } => match model.family() {
            Family::Exponential => {
                let gates: f64 = (0..=d).map(count).sum();
                let offset: f64 = (0..=d).map(|i| count(i) * (a * kf.powi((d - i) as i32)).ln()).sum();
                ((offset - model.c() * budget) / gates).exp()
            }
            _ => {
                let gates: f64 = (0..=d).map(count).sum();
                let weight: f64 = (0..=d).map(|i| count(i) * rel(i).powf(-1.0 / beta)).sum();
                a * ((budget + gates) / weight).powf(-beta)
            }
        },
    };
    let eps_levels: Vec<f64> = (0..=d).map(|i| eps_d * rel(i)).collect();
    for (level, &eps) in eps_levels.iter().enumerate() {
        if !(eps > 0.0 && eps <= a) {
            return Err(AllocError::LevelOutOfRange { level, eps });
        }
    }
    let gamma = eps_levels.iter().sum();
    let mut total_energy = 0.0;
    for (i, &eps) in eps_levels.iter().enumerate() {
        total_energy += count(i) * model.psi(eps)?;
    }
    Ok(SymmetricSolution { eps_levels, gamma, total_energy, level_ratio: ratio, printed_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{gen_balanced, gen_line, GateKind};

    fn exp1() -> EnergyFailureModel {
        EnergyFailureModel::exponential(0.5, 1.0).unwrap()
    }

    fn close_all(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn exponential_levels() {
        let s = closed_form_symmetric(2, 1, &exp1(), ClosedFormMode::MinEnergy { gamma: 0.15 }).unwrap();
        assert!(close_all(&s.eps_levels, &[0.05, 0.10], 1e-15));
        let s = closed_form_symmetric(2, 2, &exp1(), ClosedFormMode::MinEnergy { gamma: 0.175 }).unwrap();
        assert!(close_all(&s.eps_levels, &[0.025, 0.05, 0.10], 1e-15));
        assert!((s.gamma - 0.175).abs() < 1e-15);
    }

    #[test]
    fn exponential_budget_inverts() {
        let budget = 2.0 * 5f64.ln() + 10f64.ln();
        let s = closed_form_symmetric(2, 1, &exp1(), ClosedFormMode::MaxReliability { budget }).unwrap();
        assert!((s.eps_levels[1] - 0.10).abs() < 1e-12);
        assert!((s.gamma - 0.15).abs() < 1e-12);
        let s = closed_form_symmetric(2, 1, &exp1(), ClosedFormMode::MaxReliability { budget: 5.5215 }).unwrap();
        assert!((s.eps_levels[1] - 0.10).abs() < 1e-5);
    }

    #[test]
    fn polynomial_round_trip() {
        for beta in [0.5, 1.0, 2.0] {
            let m = EnergyFailureModel::polynomial(0.5, beta).unwrap();
            let s = closed_form_symmetric(3, 2, &m, ClosedFormMode::MinEnergy { gamma: 0.2 }).unwrap();
            let back =
                closed_form_symmetric(3, 2, &m, ClosedFormMode::MaxReliability { budget: s.total_energy }).unwrap();
            assert!(close_all(&s.eps_levels, &back.eps_levels, 1e-12));
            assert_eq!(s.printed_ratio.is_none(), beta == 1.0);
        }
    }

    #[test]
    fn rule_matches_closed_form() {
        let m = EnergyFailureModel::polynomial(0.5, 0.5).unwrap();
        let t = gen_balanced(3, 2, GateKind::And).unwrap();
        let eps = power_rule_alloc(&t, 0.2, power_rule_exponent(&m).unwrap()).unwrap();
        let s = closed_form_symmetric(3, 2, &m, ClosedFormMode::MinEnergy { gamma: 0.2 }).unwrap();
        let expanded = s.to_allocation(&m, &t).unwrap().eps;
        assert!(close_all(&eps, &expanded, 1e-15));
    }

    #[test]
    fn rule_on_line_is_uniform() {
        let t = gen_line(4, GateKind::And).unwrap();
        for q in [-1.0, -3.0, 1.0] {
            let eps = power_rule_alloc(&t, 0.2, q).unwrap();
            assert!(eps.iter().all(|e| (e - 0.05).abs() < 1e-15));
        }
        assert!(printed_poly_exponent(1.0).is_err());
        assert!(closed_form_symmetric(
            2,
            1,
            &EnergyFailureModel::stretched_exponential(0.5, 1.0, 0.5).unwrap(),
            ClosedFormMode::MinEnergy { gamma: 0.1 }
        )
        .is_err());
    }

    #[test]
    fn out_of_range_levels() {
        // Tiny budget pushes eps above eps0.
        let r = closed_form_symmetric(2, 1, &exp1(), ClosedFormMode::MaxReliability { budget: 0.1 });
        assert!(matches!(r, Err(AllocError::LevelOutOfRange { .. })));
    }
}
