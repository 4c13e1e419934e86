// SPDX-License-Identifier: Apache-2.0

//! Exhaustive enumeration of unlabeled rooted tree shapes.
//!
//! Every internal node has between 2 and `k` children. Shapes are canonical
//! (children in a fixed order), so each unordered tree appears once.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

impl Shape {
    pub fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(c) => c.iter().map(Shape::leaves).sum(),
        }
    }

    /// Number of internal (non-leaf) nodes.
    pub fn internal_nodes(&self) -> usize {
        match self {
            Shape::Leaf => 0,
            Shape::Node(c) => 1 + c.iter().map(Shape::internal_nodes).sum::<usize>(),
        }
    }

    /// Edges from the root to the deepest leaf.
    pub fn depth(&self) -> usize {
        match self {
            Shape::Leaf => 0,
            Shape::Node(c) => 1 + c.iter().map(Shape::depth).max().unwrap_or(0),
        }
    }

    pub fn max_arity(&self) -> usize {
        match self {
            Shape::Leaf => 0,
            Shape::Node(c) => c.iter().map(Shape::max_arity).max().unwrap_or(0).max(c.len()),
        }
    }

    /// Full `k`-ary tree with all leaves at depth `m`.
    pub fn balanced(k: usize, m: usize) -> Shape {
        if m == 0 {
            Shape::Leaf
        } else {
            Shape::Node(vec![Shape::balanced(k, m - 1); k])
        }
    }
}

/// All shapes with `leaves` leaves, indexed by leaf count `0..=max_leaves`.
pub fn enumerate(max_leaves: usize, k: usize) -> Vec<Vec<Shape>> {
    let mut by_leaves: Vec<Vec<Shape>> = vec![Vec::new(); max_leaves + 1];
    if max_leaves >= 1 {
        by_leaves[1].push(Shape::Leaf);
    }
    for l in 2..=max_leaves {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        children(&by_leaves, l, l - 1, usize::MAX, k, &mut stack, &mut out);
        by_leaves[l] = out;
    }
    by_leaves
}

// Picks children in non-increasing (leaf count, index) order so each
// multiset of subtrees is produced exactly once.
fn children(
    table: &[Vec<Shape>],
    remaining: usize,
    max_leaves: usize,
    max_index: usize,
    k: usize,
    stack: &mut Vec<Shape>,
    out: &mut Vec<Shape>,
) {
    if remaining == 0 {
        if stack.len() >= 2 {
            out.push(Shape::Node(stack.clone()));
        }
        return;
    }
    if stack.len() == k {
        return;
    }
    for leaves in (1..=max_leaves.min(remaining)).rev() {
        let limit = if leaves == max_leaves { max_index } else { usize::MAX };
        for (idx, shape) in table[leaves].iter().enumerate() {
            if idx > limit {
                break;
            }
            stack.push(shape.clone());
            children(table, remaining - leaves, leaves, idx, k, stack, out);
            stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequences() {
        // Series-reduced rooted trees by leaf count (unbounded arity).
        let all = enumerate(7, 7);
        let counts: Vec<usize> = all.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![0, 1, 1, 2, 5, 12, 33, 90]);
        // Binary trees: Wedderburn-Etherington numbers.
        let bin = enumerate(7, 2);
        let counts: Vec<usize> = bin.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![0, 1, 1, 1, 2, 3, 6, 11]);
    }

    #[test]
    fn shapes_respect_arity() {
        for (l, shapes) in enumerate(6, 3).iter().enumerate() {
            for s in shapes {
                assert_eq!(s.leaves(), l);
                assert!(s.max_arity() <= 3);
            }
        }
    }
}
