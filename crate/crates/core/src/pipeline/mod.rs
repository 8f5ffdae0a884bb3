//! Tree-shaped pipelines.
//!
//! Data flows from the leaves (copies of the input dataset) towards the
//! root. Unary nodes apply one operator, combine nodes join the feature
//! columns of their two inputs, and the root is always a classifier whose
//! guesses are the pipeline's output.

mod export;
mod format;

use std::fmt;

use thiserror::Error;

use crate::dataset::{balanced_accuracy, Dataset};
use crate::primitives::{apply_operator, combine_datasets, CombineError, OperatorFailure, OperatorKind, OperatorSpec, SpecError};
use crate::seed;

pub use export::export_readable;
pub use format::{deserialize, serialize, ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// A fresh copy of the run's input dataset.
    Leaf,
    Unary { spec: OperatorSpec, child: Box<Node> },
    Combine { left: Box<Node>, right: Box<Node> },
}

impl Node {
    pub fn unary(spec: OperatorSpec, child: Node) -> Self {
        Node::Unary { spec, child: Box::new(child) }
    }

    pub fn combine(left: Node, right: Node) -> Self {
        Node::Combine { left: Box::new(left), right: Box::new(right) }
    }

    /// Unary and combine nodes.
    pub fn operator_count(&self) -> usize {
        match self {
            Node::Leaf => 0,
            Node::Unary { child, .. } => 1 + child.operator_count(),
            Node::Combine { left, right } => 1 + left.operator_count() + right.operator_count(),
        }
    }

    /// Operators on the longest path to a leaf.
    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf => 0,
            Node::Unary { child, .. } => 1 + child.depth(),
            Node::Combine { left, right } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf => 1,
            Node::Unary { child, .. } => child.leaf_count(),
            Node::Combine { left, right } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Total nodes, leaves included.
    pub fn size(&self) -> usize {
        match self {
            Node::Leaf => 1,
            Node::Unary { child, .. } => 1 + child.size(),
            Node::Combine { left, right } => 1 + left.size() + right.size(),
        }
    }

    pub fn is_operator(&self) -> bool {
        !matches!(self, Node::Leaf)
    }

    fn children(&self) -> Vec<&Node> {
        match self {
            Node::Leaf => vec![],
            Node::Unary { child, .. } => vec![child],
            Node::Combine { left, right } => vec![left, right],
        }
    }

    /// Node at preorder position `index` (the root is 0).
    pub fn get(&self, index: usize) -> Option<&Node> {
        fn walk<'a>(node: &'a Node, index: &mut usize) -> Option<&'a Node> {
            if *index == 0 {
                return Some(node);
            }
            *index -= 1;
            node.children().into_iter().find_map(|c| walk(c, index))
        }
        let mut index = index;
        walk(self, &mut index)
    }

    pub fn get_mut(&mut self, index: usize) -> Option<&mut Node> {
        fn walk<'a>(node: &'a mut Node, index: &mut usize) -> Option<&'a mut Node> {
            if *index == 0 {
                return Some(node);
            }
            *index -= 1;
            match node {
                Node::Leaf => None,
                Node::Unary { child, .. } => walk(child, index),
                Node::Combine { left, right } => {
                    if let Some(found) = walk(left, index) {
                        return Some(found);
                    }
                    walk(right, index)
                }
            }
        }
        let mut index = index;
        walk(self, &mut index)
    }

    /// Every node in preorder with its level (root level 0).
    pub fn positions(&self) -> Vec<NodePosition> {
        fn walk(node: &Node, level: usize, out: &mut Vec<NodePosition>) {
            out.push(NodePosition {
                index: out.len(),
                level,
                kind: match node {
                    Node::Leaf => NodeKind::Leaf,
                    Node::Unary { .. } => NodeKind::Unary,
                    Node::Combine { .. } => NodeKind::Combine,
                },
            });
            for c in node.children() {
                walk(c, level + 1, out);
            }
        }
        let mut out = Vec::new();
        walk(self, 0, &mut out);
        out
    }

    /// Operator specs in preorder.
    pub fn specs(&self) -> Vec<&OperatorSpec> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if let Node::Unary { spec, .. } = node {
                out.push(spec);
            }
            stack.extend(node.children().into_iter().rev());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Unary,
    Combine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodePosition {
    pub index: usize,
    pub level: usize,
    pub kind: NodeKind,
}

/// Hard caps on tree shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeLimits {
    pub max_depth: usize,
    pub max_operators: usize,
}

impl Default for TreeLimits {
    fn default() -> Self {
        Self { max_depth: 10, max_operators: 50 }
    }
}

impl TreeLimits {
    pub fn admits(&self, node: &Node) -> bool {
        node.depth() <= self.max_depth && node.operator_count() <= self.max_operators
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineTree {
    root: Node,
}

impl PipelineTree {
    /// Wraps `root` without checking it; see [`validate`].
    pub fn new(root: Node) -> Self {
        Self { root }
    }

    /// A single classifier over the input.
    pub fn classifier(spec: OperatorSpec) -> Self {
        Self::new(Node::unary(spec, Node::Leaf))
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn root_mut(&mut self) -> &mut Node {
        &mut self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    pub fn operator_count(&self) -> usize {
        self.root.operator_count()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn root_kind(&self) -> Option<OperatorKind> {
        match &self.root {
            Node::Unary { spec, .. } => Some(spec.kind()),
            _ => None,
        }
    }
}

impl fmt::Display for PipelineTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("root not a classifier (found {0})")]
    RootNotClassifier(String),
    #[error("depth {depth} exceeds the cap of {max}")]
    TooDeep { depth: usize, max: usize },
    #[error("{count} operators exceed the cap of {max}")]
    TooManyOperators { count: usize, max: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(SpecError),
}

/// Checks the structural invariants, returning every violation found.
pub fn validate(t: &PipelineTree, limits: &TreeLimits) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    match &t.root {
        Node::Unary { spec, .. } if spec.kind().is_classifier() => {}
        Node::Unary { spec, .. } => violations.push(Violation::RootNotClassifier(spec.kind().to_string())),
        Node::Combine { .. } => violations.push(Violation::RootNotClassifier("CombineDFs".into())),
        Node::Leaf => violations.push(Violation::RootNotClassifier("INPUT".into())),
    }
    let depth = t.depth();
    if depth > limits.max_depth {
        violations.push(Violation::TooDeep { depth, max: limits.max_depth });
    }
    let count = t.operator_count();
    if count > limits.max_operators {
        violations.push(Violation::TooManyOperators { count, max: limits.max_operators });
    }
    for spec in t.root.specs() {
        if let Err(e) = spec.check() {
            violations.push(Violation::InvalidParams(e));
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Pipeline objectives: balanced accuracy on test rows (up) and operator
/// count (down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    pub accuracy: f64,
    pub operators: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    tree: PipelineTree,
    fitness: Option<Fitness>,
}

impl Individual {
    pub fn new(tree: PipelineTree) -> Self {
        Self { tree, fitness: None }
    }

    pub fn evaluated(tree: PipelineTree, fitness: Fitness) -> Self {
        Self { tree, fitness: Some(fitness) }
    }

    pub fn tree(&self) -> &PipelineTree {
        &self.tree
    }

    pub fn fitness(&self) -> Option<Fitness> {
        self.fitness
    }

    pub fn set_fitness(&mut self, fitness: Fitness) {
        self.fitness = Some(fitness);
    }

    /// Replaces the tree; the fitness is kept only if the tree is unchanged.
    pub fn set_tree(&mut self, tree: PipelineTree) {
        if tree != self.tree {
            self.fitness = None;
        }
        self.tree = tree;
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecutionError {
    #[error(transparent)]
    Operator(#[from] OperatorFailure),
    #[error(transparent)]
    Combine(#[from] CombineError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("invalid tree: {0:?}")]
    InvalidTree(Vec<Violation>),
    #[error("structural error during evaluation: {0}")]
    Structural(CombineError),
    #[error("root produced no guesses")]
    NoGuesses,
    #[error("dataset has no test rows")]
    NoTestRows,
}

/// Runs the tree over `d` in post-order and returns the root's output. The
/// unary node at preorder position `i` fits with seed `derive(seed, [i])`.
pub fn execute(t: &PipelineTree, d: &Dataset, seed: u64) -> Result<Dataset, ExecutionError> {
    fn run(node: &Node, index: &mut usize, d: &Dataset, seed: u64) -> Result<Dataset, ExecutionError> {
        let here = *index;
        *index += 1;
        match node {
            Node::Leaf => Ok(d.clone()),
            Node::Unary { spec, child } => {
                let input = run(child, index, d, seed)?;
                Ok(apply_operator(spec, &input, seed::derive_seed(seed, &[here as u64]))?)
            }
            Node::Combine { left, right } => {
                let l = run(left, index, d, seed)?;
                let r = run(right, index, d, seed)?;
                Ok(combine_datasets(&l, &r)?)
            }
        }
    }
    run(&t.root, &mut 0, d, seed)
}

/// Scores a tree: balanced accuracy of the root's guesses over the test
/// rows of `d`. Operator failures score accuracy 0.
pub fn evaluate(t: &PipelineTree, d: &Dataset, seed: u64, limits: &TreeLimits) -> Result<Fitness, EvalError> {
    validate(t, limits).map_err(EvalError::InvalidTree)?;
    let operators = t.operator_count();
    let output = match execute(t, d, seed) {
        Ok(output) => output,
        Err(ExecutionError::Operator(_)) => return Ok(Fitness { accuracy: 0.0, operators }),
        Err(ExecutionError::Combine(e)) => return Err(EvalError::Structural(e)),
    };
    let guesses = output.guess_labels().ok_or(EvalError::NoGuesses)?;
    let test = d.test_indices();
    if test.is_empty() {
        return Err(EvalError::NoTestRows);
    }
    let truth: Vec<usize> = test.iter().map(|&i| d.class_labels()[i]).collect();
    let guessed: Vec<usize> = test.iter().map(|&i| guesses[i]).collect();
    let accuracy = balanced_accuracy(&truth, &guessed).map_err(|_| EvalError::NoTestRows)?;
    Ok(Fitness { accuracy, operators })
}

/// Every leaf-to-root path as operator kinds in data-flow order. Combine
/// nodes contribute no token.
pub fn extract_chains(t: &PipelineTree) -> Vec<Vec<OperatorKind>> {
    fn walk(node: &Node, above: &mut Vec<OperatorKind>, out: &mut Vec<Vec<OperatorKind>>) {
        match node {
            Node::Leaf => out.push(above.iter().rev().copied().collect()),
            Node::Unary { spec, child } => {
                above.push(spec.kind());
                walk(child, above, out);
                above.pop();
            }
            Node::Combine { left, right } => {
                walk(left, above, out);
                walk(right, above, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(&t.root, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests;
