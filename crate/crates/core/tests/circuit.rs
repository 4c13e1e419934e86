// SPDX-License-Identifier: Apache-2.0

use energy_reliability::circuit::shapes::{enumerate, Shape};
use energy_reliability::circuit::{
    gen_balanced, gen_line, gen_random, parse_circuit, GateKind, GateTree, RandomTreeConfig,
};
use energy_reliability::evaluate::{noiseless_output, pattern_bits};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_tree() -> impl Strategy<Value = GateTree> {
    (1usize..40, 1usize..5, any::<u64>(), 0.0f64..0.6).prop_map(|(n, k, seed, fan_out)| {
        let mut cfg = RandomTreeConfig::new(n, k.max(1));
        cfg.fan_out = fan_out;
        cfg.kinds.push(GateKind::TruthTable(Vec::new()));
        gen_random(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    })
}

fn is_prefix_of(short: &[usize], long: &[usize]) -> bool {
    short.len() <= long.len() && long[long.len() - short.len()..] == *short
}

proptest! {
    #[test]
    fn maximal_paths_are_maximal(tree in random_tree()) {
        let paths = tree.maximal_paths();
        prop_assert_eq!(paths.paths.len(), tree.leaf_gates().len());
        for (i, p) in paths.paths.iter().enumerate() {
            prop_assert_eq!(p.last().copied(), Some(tree.root()));
            for (j, q) in paths.paths.iter().enumerate() {
                if i != j {
                    prop_assert!(!is_prefix_of(p, q), "{p:?} inside {q:?}");
                }
            }
        }
    }

    #[test]
    fn every_input_path_ends_a_maximal_path(tree in random_tree()) {
        let paths = tree.maximal_paths();
        for i in 0..tree.n_inputs() {
            let p = tree.input_path(i).unwrap();
            let hits = paths.paths.iter().filter(|m| is_prefix_of(&p, m)).count();
            prop_assert!(hits >= 1, "input {i}: {p:?}");
            prop_assert!(p.len() <= tree.max_input_path_len());
        }
    }

    #[test]
    fn json_round_trip_preserves_function(tree in random_tree()) {
        let back = parse_circuit(&tree.to_json()).unwrap();
        prop_assert_eq!(back.len(), tree.len());
        prop_assert_eq!(back.n_inputs(), tree.n_inputs());
        prop_assert_eq!(back.depth(), tree.depth());
        let n = tree.n_inputs().min(10);
        for pattern in 0..1u64 << n {
            let mut x = pattern_bits(pattern, n);
            x.resize(tree.n_inputs(), false);
            prop_assert_eq!(noiseless_output(&tree, &x).unwrap(), noiseless_output(&back, &x).unwrap());
        }
    }
}

#[test]
fn longest_input_path_by_shape() {
    for (k, d) in [(2, 0), (2, 3), (3, 2), (5, 1)] {
        assert_eq!(gen_balanced(k, d, GateKind::And).unwrap().max_input_path_len(), d + 1);
    }
    for m in 1..10 {
        assert_eq!(gen_line(m, GateKind::Or).unwrap().max_input_path_len(), m);
    }
}

#[test]
fn balanced_trees_minimize_internal_nodes_and_depth() {
    let table = enumerate(9, 3);
    for k in [2usize, 3] {
        for m in 1..=3 {
            let leaves = k.pow(m as u32);
            if leaves > 9 {
                continue;
            }
            let b = Shape::balanced(k, m);
            let fits: Vec<&Shape> = table[leaves].iter().filter(|s| s.max_arity() <= k).collect();
            assert!(fits.contains(&&b));
            assert_eq!(b.internal_nodes(), fits.iter().map(|s| s.internal_nodes()).min().unwrap());
            assert_eq!(b.depth(), fits.iter().map(|s| s.depth()).min().unwrap());
            // A full k-ary tree with L leaves has (L-1)/(k-1) internal nodes.
            assert_eq!(b.internal_nodes(), (leaves - 1) / (k - 1));
        }
    }
}

#[test]
fn minima_grow_with_leaf_count() {
    for k in 2..=4 {
        let table = enumerate(8, k);
        let mins: Vec<(usize, usize)> = table[1..]
            .iter()
            .map(|shapes| {
                let nodes = shapes.iter().map(Shape::internal_nodes).min().unwrap();
                let depth = shapes.iter().map(Shape::depth).min().unwrap();
                (nodes, depth)
            })
            .collect();
        assert!(mins.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1), "k={k}: {mins:?}");
    }
}
