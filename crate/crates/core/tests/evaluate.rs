// SPDX-License-Identifier: Apache-2.0

use energy_reliability::circuit::{gen_balanced, gen_line, gen_random, GateKind, GateTree, RandomTreeConfig};
use energy_reliability::evaluate::{eval_bruteforce, eval_exact, eval_report, info_audit, pattern_bits, sdpi_check};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tree_strategy(max_gates: usize, kinds: Vec<GateKind>) -> impl Strategy<Value = GateTree> {
    (1..=max_gates, any::<u64>(), 0.0f64..0.5).prop_map(move |(n, seed, fan_out)| {
        let mut cfg = RandomTreeConfig::new(n, 3);
        cfg.kinds = kinds.clone();
        cfg.fan_out = fan_out;
        gen_random(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    })
}

fn all_kinds() -> Vec<GateKind> {
    vec![GateKind::And, GateKind::Or, GateKind::Nand, GateKind::Nor, GateKind::Xor, GateKind::TruthTable(Vec::new())]
}

fn eps_for(tree: &GateTree, raw: &[f64]) -> Vec<f64> {
    (0..tree.len()).map(|g| raw[g % raw.len()]).collect()
}

proptest! {
    #[test]
    fn exact_matches_bruteforce(
        tree in tree_strategy(8, all_kinds()),
        raw in prop::collection::vec(0.0f64..=0.5, 8),
        pattern in any::<u64>(),
    ) {
        let eps = eps_for(&tree, &raw);
        let n = tree.n_inputs();
        let x = pattern_bits(pattern & ((1 << n) - 1), n);
        let a = eval_exact(&tree, &eps, &x).unwrap();
        let b = eval_bruteforce(&tree, &eps, &x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn parity_ignores_topology(
        tree in tree_strategy(10, vec![GateKind::Xor]),
        raw in prop::collection::vec(0.0f64..=0.5, 10),
    ) {
        let eps = eps_for(&tree, &raw);
        let report = eval_report(&tree, &eps).unwrap();
        let closed = 0.5 * (1.0 - eps.iter().map(|e| 1.0 - 2.0 * e).product::<f64>());
        prop_assert_eq!(report.parity_closed_form, Some(closed));
        for p in &report.per_input_error {
            prop_assert!((p - closed).abs() <= 1e-12);
        }
        // A line with the same noise levels in any order behaves identically.
        let line = gen_line(tree.len(), GateKind::Xor).unwrap();
        let mut rev = eps.clone();
        rev.reverse();
        let other = eval_report(&line, &rev).unwrap();
        prop_assert!((other.worst_delta - report.worst_delta).abs() <= 1e-12);
    }

    #[test]
    fn information_chain_holds(
        tree in tree_strategy(8, all_kinds()),
        raw in prop::collection::vec(0.0f64..0.5, 8),
        input in any::<prop::sample::Index>(),
    ) {
        let eps = eps_for(&tree, &raw);
        let i = input.index(tree.n_inputs());
        if let Some(a) = info_audit(&tree, &eps, i).unwrap() {
            prop_assert!(a.fano_lhs <= a.mutual_information + 1e-10, "{a:?}");
            prop_assert!(a.mutual_information <= a.sdpi_rhs + 1e-10, "{a:?}");
            prop_assert!(a.passed());
        }
    }

    #[test]
    fn sdpi_on_random_joints(w in prop::array::uniform4(1e-9f64..1.0), eps in 0.0f64..=0.5) {
        let t: f64 = w.iter().sum();
        let joint = [[w[0] / t, w[1] / t], [w[2] / t, w[3] / t]];
        let check = sdpi_check(&joint, eps).unwrap();
        prop_assert!(check.pass, "{check:?}");
    }

    #[test]
    fn more_noise_never_helps_parity(
        tree in tree_strategy(8, vec![GateKind::Xor]),
        raw in prop::collection::vec(0.0f64..=0.5, 8),
        gate in any::<prop::sample::Index>(),
        bump in 0.0f64..1.0,
    ) {
        let eps = eps_for(&tree, &raw);
        let g = gate.index(tree.len());
        let mut worse = eps.clone();
        worse[g] += bump * (0.5 - eps[g]);
        let a = eval_report(&tree, &eps).unwrap().worst_delta;
        let b = eval_report(&tree, &worse).unwrap().worst_delta;
        prop_assert!(b >= a - 1e-12, "{a} -> {b}");
    }

    #[test]
    fn one_noisy_gate_degrades_monotonically(
        tree in tree_strategy(8, all_kinds()),
        gate in any::<prop::sample::Index>(),
        lo in 0.0f64..=0.5,
        hi in 0.0f64..=0.5,
    ) {
        let g = gate.index(tree.len());
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let mut eps = vec![0.0; tree.len()];
        eps[g] = lo;
        let a = eval_report(&tree, &eps).unwrap().worst_delta;
        eps[g] = hi;
        let b = eval_report(&tree, &eps).unwrap().worst_delta;
        prop_assert!(b >= a - 1e-12, "{a} -> {b}");
    }
}

// With several noisy gates, extra noise on one gate can mask errors from
// another. Root AND(a, b) with a = AND(x0, x1) and b an OR of two ORs: the
// worst pattern is a = 1, b = 0, where P_e = (1 - eps_a) P(b reads 1)
// falls as eps_a grows.
#[test]
fn extra_noise_can_lower_the_worst_case() {
    let json = r#"{
        "root": 0,
        "gates": [
            {"id": 0, "kind": "AND", "children": [{"gate": 1}, {"gate": 2}]},
            {"id": 1, "kind": "AND", "children": [{"input": 0}, {"input": 1}]},
            {"id": 2, "kind": "OR", "children": [{"gate": 3}, {"gate": 4}]},
            {"id": 3, "kind": "OR", "children": [{"input": 2}, {"input": 3}]},
            {"id": 4, "kind": "OR", "children": [{"input": 4}, {"input": 5}]}
        ]
    }"#;
    let tree = energy_reliability::circuit::parse_circuit(json).unwrap();
    let e = 0.02;
    let with_a = |eps_a: f64| -> Vec<f64> {
        tree.gates()
            .iter()
            .map(|g| match (&g.kind, g.id == tree.root()) {
                (_, true) => 0.0,
                (GateKind::And, false) => eps_a,
                _ => e,
            })
            .collect()
    };
    let before = eval_report(&tree, &with_a(0.0)).unwrap().worst_delta;
    let after = eval_report(&tree, &with_a(0.005)).unwrap().worst_delta;
    let q = 1.0 - (1.0 - e) * (1.0 - e);
    let masked = q * (1.0 - e) + (1.0 - q) * e;
    assert!((before - masked).abs() < 1e-12, "{before}");
    assert!((after - 0.995 * masked).abs() < 1e-12, "{after}");
}

#[test]
fn tree_and_line_agree_for_xor() {
    let tree = gen_balanced(2, 1, GateKind::Xor).unwrap();
    let line = gen_line(3, GateKind::Xor).unwrap();
    let eps = [0.03, 0.07, 0.11];
    let a = eval_report(&tree, &eps).unwrap();
    let b = eval_report(&line, &eps).unwrap();
    for (x, y) in a.per_input_error.iter().zip(&b.per_input_error) {
        assert!((x - y).abs() <= 1e-12);
    }
    assert!((a.cond_error_entropy - b.cond_error_entropy).abs() <= 1e-12);
}

#[test]
fn noiseless_circuit_never_errs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let tree = gen_random(&RandomTreeConfig::new(6, 3), &mut rng).unwrap();
        let r = eval_report(&tree, &vec![0.0; tree.len()]).unwrap();
        assert_eq!(r.worst_delta, 0.0);
        assert_eq!(r.cond_error_entropy, 0.0);
    }
}
