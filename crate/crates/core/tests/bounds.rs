// SPDX-License-Identifier: Apache-2.0

use energy_reliability::bounds::{
    bound_corollary1, bound_graph_specific, bound_theorem1, gamma_inverse, make_target, scaling_table,
};
use energy_reliability::circuit::{gen_balanced, GateKind};
use energy_reliability::efmodel::EnergyFailureModel;
use energy_reliability::info::binary_entropy;
use proptest::prelude::*;

fn models() -> Vec<EnergyFailureModel> {
    vec![
        EnergyFailureModel::exponential(0.5, 1.0).unwrap(),
        EnergyFailureModel::exponential(0.2, 3.0).unwrap(),
        EnergyFailureModel::polynomial(0.5, 1.0).unwrap(),
        EnergyFailureModel::polynomial(0.4, 2.5).unwrap(),
        EnergyFailureModel::stretched_exponential(0.5, 1.0, 0.5).unwrap(),
    ]
}

#[test]
fn graph_specific_dominates_function_agnostic() {
    for model in models() {
        for delta in [0.01, 0.1, 0.3] {
            let target = make_target(delta).unwrap();
            for (k, d) in [(2, 1), (2, 3), (2, 6), (3, 2), (4, 3)] {
                let tree = gen_balanced(k, d, GateKind::Nand).unwrap();
                let n = k.pow(d as u32 + 1);
                let g = bound_graph_specific(&tree, &model, &target).unwrap().bound_energy;
                let t = bound_theorem1(n, k, &model, &target).unwrap().bound_energy;
                assert!(g >= t * (1.0 - 1e-12), "{model} k={k} d={d} delta={delta}: {g} < {t}");
            }
        }
    }
}

#[test]
fn corollary_matches_theorem_at_unit_beta() {
    let target = make_target(0.1).unwrap();
    for model in [
        EnergyFailureModel::exponential(0.5, 1.0).unwrap(),
        EnergyFailureModel::stretched_exponential(0.5, 2.0, 1.0).unwrap(),
    ] {
        for n in [4usize, 9, 100, 1 << 12, 1 << 20] {
            for k in [2usize, 3] {
                if k >= n {
                    continue;
                }
                let t = bound_theorem1(n, k, &model, &target).unwrap().bound_energy;
                let c = bound_corollary1(n, k, &model, &target).unwrap().bound_energy;
                assert!((t - c).abs() <= 1e-10 * t, "n={n} k={k}: {t} vs {c}");
            }
        }
    }
}

#[test]
fn gamma_inverse_undoes_make_target() {
    for i in 0..=490 {
        let delta = i as f64 / 1000.0;
        let t = make_target(delta).unwrap();
        let back = gamma_inverse(t.gamma).unwrap();
        assert!(!back.saturated);
        assert!((back.delta - delta).abs() <= 1e-9, "{delta}: {}", back.delta);
    }
}

#[test]
fn polynomial_scaling_grows_like_log_n() {
    let model = EnergyFailureModel::polynomial(0.5, 1.0).unwrap();
    let target = make_target(0.1).unwrap();
    let rows = scaling_table(&model, 2, &target, &[4, 16, 256, 65536]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].bound_per_input > w[0].bound_per_input));
    // psi = a/eps - 1, so bound/n = (a ln n / (gamma ln 2) - 1) / 2.
    for r in &rows {
        let expect = (0.5 * (r.n as f64).ln() / (target.gamma * 2f64.ln()) - 1.0) / 2.0;
        assert!((r.bound_per_input - expect).abs() <= 1e-10 * expect);
    }
}

proptest! {
    #[test]
    fn c1_implies_c3(delta in 1e-6f64..0.499, eps in 0.0f64..0.5, len in 1u32..40) {
        let lhs = 1.0 - binary_entropy(delta);
        if lhs <= (1.0 - 2.0 * eps).powi(2 * len as i32) {
            let gamma = make_target(delta).unwrap().gamma;
            prop_assert!(gamma >= len as f64 * eps * (1.0 - 1e-12));
        }
    }

    #[test]
    fn dominated_model_has_smaller_bound(
        a in 0.05f64..0.5,
        c1 in 0.2f64..5.0,
        dc in 0.0f64..3.0,
        delta in 1e-3f64..0.4,
        p in 2u32..20,
    ) {
        // exp(a, c2) with c2 >= c1 lies below exp(a, c1) pointwise.
        let low = EnergyFailureModel::exponential(a, c1 + dc).unwrap();
        let high = EnergyFailureModel::exponential(a, c1).unwrap();
        let target = make_target(delta).unwrap();
        let n = 1usize << p;
        let bl = bound_theorem1(n, 2, &low, &target).unwrap().bound_energy;
        let bh = bound_theorem1(n, 2, &high, &target).unwrap().bound_energy;
        prop_assert!(bl <= bh * (1.0 + 1e-12));
    }

    #[test]
    fn bounds_are_nonnegative(delta in 1e-6f64..0.499, p in 2u32..30, k in 2usize..6) {
        let n = 1usize << p;
        prop_assume!(k < n);
        let target = make_target(delta).unwrap();
        for model in models() {
            let t = bound_theorem1(n, k, &model, &target).unwrap();
            prop_assert!(t.bound_energy >= 0.0);
            let c = bound_corollary1(n, k, &model, &target).unwrap();
            prop_assert!(c.bound_energy >= 0.0);
        }
    }
}
