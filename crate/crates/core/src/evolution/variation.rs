//! Tree initialization, one-point crossover and point/insert/shrink mutation.

use rand::Rng;

use crate::pipeline::{Node, NodeKind, PipelineTree, TreeLimits};
use crate::primitives::{OperatorKind, OperatorSpec};

/// Deepest tree the grow method builds.
pub const MAX_INIT_DEPTH: usize = 3;

/// Longest block prefix kept when instantiating a building block.
pub const MAX_BLOCK_OPERATORS: usize = 3;

fn random_classifier<R: Rng + ?Sized>(rng: &mut R) -> OperatorSpec {
    let kind = OperatorKind::CLASSIFIERS[rng.random_range(0..OperatorKind::CLASSIFIERS.len())];
    OperatorSpec::random(kind, rng)
}

fn random_operator<R: Rng + ?Sized>(rng: &mut R) -> OperatorSpec {
    let kind = OperatorKind::ALL[rng.random_range(0..OperatorKind::ALL.len())];
    OperatorSpec::random(kind, rng)
}

fn grow<R: Rng + ?Sized>(budget: usize, rng: &mut R) -> Node {
    if budget == 0 {
        return Node::Leaf;
    }
    // Leaf, every operator kind, CombineDFs
    let choice = rng.random_range(0..OperatorKind::ALL.len() + 2);
    if choice == 0 {
        Node::Leaf
    } else if choice <= OperatorKind::ALL.len() {
        let spec = OperatorSpec::random(OperatorKind::ALL[choice - 1], rng);
        Node::unary(spec, grow(budget - 1, rng))
    } else {
        let left = grow(budget - 1, rng);
        let right = grow(budget - 1, rng);
        Node::combine(left, right)
    }
}

/// Grow-method tree: depth budget uniform in `[1, 3]`, classifier root.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R) -> PipelineTree {
    let depth = rng.random_range(1..=MAX_INIT_DEPTH);
    let root = random_classifier(rng);
    PipelineTree::new(Node::unary(root, grow(depth - 1, rng)))
}

/// Linear tree over a Leaf from the last three kinds of `chain`, with
/// random terminals and a random classifier root when the chain does not
/// end in one.
pub fn tree_from_chain<R: Rng + ?Sized>(chain: &[OperatorKind], rng: &mut R) -> PipelineTree {
    let start = chain.len().saturating_sub(MAX_BLOCK_OPERATORS);
    let mut node = Node::Leaf;
    for &kind in &chain[start..] {
        node = Node::unary(OperatorSpec::random(kind, rng), node);
    }
    PipelineTree::new(repair_root(node, rng))
}

/// Wraps `node` in a random classifier unless its root already is one.
fn repair_root<R: Rng + ?Sized>(node: Node, rng: &mut R) -> Node {
    match &node {
        Node::Unary { spec, .. } if spec.kind().is_classifier() => node,
        _ => Node::unary(random_classifier(rng), node),
    }
}

fn replace_at(root: &mut Node, index: usize, with: Node) -> Node {
    let slot = root.get_mut(index).expect("index from positions()");
    std::mem::replace(slot, with)
}

fn non_root_operators(node: &Node) -> Vec<usize> {
    node.positions()
        .into_iter()
        .filter(|p| p.index > 0 && p.kind != NodeKind::Leaf)
        .map(|p| p.index)
        .collect()
}

fn enforce_caps<R: Rng + ?Sized>(mut root: Node, index: usize, limits: &TreeLimits, rng: &mut R) -> Node {
    if !limits.admits(&root) {
        replace_at(&mut root, index, Node::Leaf);
        root = repair_root(root, rng);
    }
    root
}

/// One-point crossover. Swaps a uniformly chosen non-root operator subtree
/// of each parent, or the whole trees when either has no such node.
/// Offspring that break `limits` have the received subtree cut to a Leaf.
pub fn crossover<R: Rng + ?Sized>(
    a: &PipelineTree,
    b: &PipelineTree,
    limits: &TreeLimits,
    rng: &mut R,
) -> (PipelineTree, PipelineTree) {
    let points_a = non_root_operators(a.root());
    let points_b = non_root_operators(b.root());
    if points_a.is_empty() || points_b.is_empty() {
        return (b.clone(), a.clone());
    }
    let ia = points_a[rng.random_range(0..points_a.len())];
    let ib = points_b[rng.random_range(0..points_b.len())];
    let mut root_a = a.root().clone();
    let mut root_b = b.root().clone();
    let sub_b = b.root().get(ib).expect("valid index").clone();
    let sub_a = replace_at(&mut root_a, ia, sub_b);
    replace_at(&mut root_b, ib, sub_a);
    let root_a = enforce_caps(root_a, ia, limits, rng);
    let root_b = enforce_caps(root_b, ib, limits, rng);
    (PipelineTree::new(root_a), PipelineTree::new(root_b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    Point,
    Insert,
    Shrink,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] = [MutationKind::Point, MutationKind::Insert, MutationKind::Shrink];
}

/// Applies one of the three mutations, each with probability 1/3.
pub fn mutate<R: Rng + ?Sized>(t: &PipelineTree, limits: &TreeLimits, rng: &mut R) -> PipelineTree {
    let kind = MutationKind::ALL[rng.random_range(0..3)];
    mutate_with(t, kind, limits, rng)
}

/// Applies the given mutation. Insert falls back to Point when it would
/// break `limits`; Shrink falls back to Point when there is no non-root
/// unary node to splice out.
pub fn mutate_with<R: Rng + ?Sized>(
    t: &PipelineTree,
    kind: MutationKind,
    limits: &TreeLimits,
    rng: &mut R,
) -> PipelineTree {
    let positions = t.root().positions();
    match kind {
        MutationKind::Point => point(t, rng),
        MutationKind::Insert => {
            let edges: Vec<usize> = positions.iter().filter(|p| p.index > 0).map(|p| p.index).collect();
            if edges.is_empty() {
                return point(t, rng);
            }
            let at = edges[rng.random_range(0..edges.len())];
            let mut root = t.root().clone();
            let below = replace_at(&mut root, at, Node::Leaf);
            replace_at(&mut root, at, Node::unary(random_operator(rng), below));
            if limits.admits(&root) {
                PipelineTree::new(root)
            } else {
                point(t, rng)
            }
        }
        MutationKind::Shrink => {
            let unary: Vec<usize> = positions
                .iter()
                .filter(|p| p.index > 0 && p.kind == NodeKind::Unary)
                .map(|p| p.index)
                .collect();
            if unary.is_empty() {
                return point(t, rng);
            }
            let at = unary[rng.random_range(0..unary.len())];
            let mut root = t.root().clone();
            let Node::Unary { child, .. } = replace_at(&mut root, at, Node::Leaf) else {
                unreachable!("position filtered to unary nodes")
            };
            replace_at(&mut root, at, *child);
            PipelineTree::new(root)
        }
    }
}

fn point<R: Rng + ?Sized>(t: &PipelineTree, rng: &mut R) -> PipelineTree {
    let unary: Vec<usize> = t
        .root()
        .positions()
        .into_iter()
        .filter(|p| p.kind == NodeKind::Unary)
        .map(|p| p.index)
        .collect();
    let at = unary[rng.random_range(0..unary.len())];
    let mut root = t.root().clone();
    let Some(Node::Unary { spec, .. }) = root.get_mut(at) else {
        unreachable!("position filtered to unary nodes")
    };
    let redrawn = if rng.random_bool(0.5) { spec.redraw_one(rng) } else { None };
    *spec = match redrawn {
        Some(s) => s,
        None if at == 0 => random_classifier(rng),
        None => random_operator(rng),
    };
    PipelineTree::new(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::validate;
    use crate::seed;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn multiset(nodes: &[&PipelineTree]) -> BTreeMap<String, usize> {
        fn walk(node: &Node, out: &mut BTreeMap<String, usize>) {
            let key = match node {
                Node::Leaf => "INPUT".to_string(),
                Node::Unary { spec, .. } => format!("{spec:?}"),
                Node::Combine { .. } => "CombineDFs".to_string(),
            };
            *out.entry(key).or_default() += 1;
            match node {
                Node::Leaf => {}
                Node::Unary { child, .. } => walk(child, out),
                Node::Combine { left, right } => {
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        let mut out = BTreeMap::new();
        for t in nodes {
            walk(t.root(), &mut out);
        }
        out
    }

    #[test]
    fn random_trees_are_valid_and_shallow() {
        let mut rng = seed::stream(3, &[]);
        for _ in 0..500 {
            let t = random_tree(&mut rng);
            assert!(validate(&t, &TreeLimits::default()).is_ok());
            assert!(t.depth() <= MAX_INIT_DEPTH);
        }
    }

    #[test]
    fn block_instantiation() {
        let mut rng = seed::stream(4, &[]);
        let t = tree_from_chain(&[OperatorKind::PolynomialFeatures, OperatorKind::LogisticRegression], &mut rng);
        assert_eq!(t.operator_count(), 2);
        assert_eq!(t.root_kind(), Some(OperatorKind::LogisticRegression));
        let t = tree_from_chain(&[OperatorKind::StandardScaler], &mut rng);
        assert_eq!(t.operator_count(), 2);
        assert!(t.root_kind().unwrap().is_classifier());
        let long = [
            OperatorKind::StandardScaler,
            OperatorKind::Binarizer,
            OperatorKind::SelectKBest,
            OperatorKind::RandomForest,
        ];
        let t = tree_from_chain(&long, &mut rng);
        assert_eq!(t.operator_count(), 3);
    }

    #[test]
    fn single_node_crossover_swaps() {
        let limits = TreeLimits::default();
        let a = PipelineTree::classifier(OperatorSpec::new(OperatorKind::DecisionTree));
        let b = PipelineTree::classifier(OperatorSpec::new(OperatorKind::RandomForest));
        let (x, y) = crossover(&a, &b, &limits, &mut seed::stream(0, &[]));
        assert_eq!((x, y), (b, a));
    }

    #[test]
    fn shrink_on_single_operator_falls_back() {
        let limits = TreeLimits::default();
        let a = PipelineTree::classifier(OperatorSpec::new(OperatorKind::DecisionTree));
        let mut rng = seed::stream(1, &[]);
        for _ in 0..50 {
            let t = mutate_with(&a, MutationKind::Shrink, &limits, &mut rng);
            assert_eq!(t.operator_count(), 1);
            assert!(t.root_kind().unwrap().is_classifier());
        }
    }

    #[test]
    fn insert_respects_caps() {
        let limits = TreeLimits { max_depth: 1, max_operators: 50 };
        let a = PipelineTree::classifier(OperatorSpec::new(OperatorKind::DecisionTree));
        let t = mutate_with(&a, MutationKind::Insert, &limits, &mut seed::stream(2, &[]));
        assert_eq!(t.operator_count(), 1);
    }

    proptest! {
        #[test]
        fn variation_keeps_trees_valid(s in any::<u64>()) {
            let limits = TreeLimits::default();
            let mut rng = seed::stream(s, &[]);
            let a = random_tree(&mut rng);
            let b = random_tree(&mut rng);
            let (x, y) = crossover(&a, &b, &limits, &mut rng);
            prop_assert!(validate(&x, &limits).is_ok());
            prop_assert!(validate(&y, &limits).is_ok());
            prop_assert_eq!(multiset(&[&a, &b]), multiset(&[&x, &y]));
            for kind in MutationKind::ALL {
                let m = mutate_with(&a, kind, &limits, &mut rng);
                prop_assert!(validate(&m, &limits).is_ok());
                match kind {
                    MutationKind::Point => prop_assert_eq!(m.operator_count(), a.operator_count()),
                    MutationKind::Insert => prop_assert_eq!(m.operator_count(), a.operator_count() + 1),
                    MutationKind::Shrink => prop_assert!(m.operator_count() + 1 >= a.operator_count()),
                }
            }
        }

        #[test]
        fn tight_caps_are_enforced(s in any::<u64>()) {
            let limits = TreeLimits { max_depth: 3, max_operators: 4 };
            let mut rng = seed::stream(s, &[]);
            let mut a = random_tree(&mut rng);
            let mut b = random_tree(&mut rng);
            for _ in 0..20 {
                if validate(&a, &limits).is_err() { a = PipelineTree::classifier(OperatorSpec::new(OperatorKind::DecisionTree)); }
                if validate(&b, &limits).is_err() { b = PipelineTree::classifier(OperatorSpec::new(OperatorKind::RandomForest)); }
                let (x, y) = crossover(&a, &b, &limits, &mut rng);
                prop_assert!(validate(&x, &limits).is_ok());
                prop_assert!(validate(&y, &limits).is_ok());
                a = mutate(&x, &limits, &mut rng);
                b = mutate(&y, &limits, &mut rng);
                prop_assert!(validate(&a, &limits).is_ok());
                prop_assert!(validate(&b, &limits).is_ok());
            }
        }
    }
}
