use super::*;
use crate::dataset::{make_synthetic, Group, SyntheticKind};
use crate::evolution::random_tree;
use crate::primitives::{FailureCause, OperatorSpec};
use proptest::prelude::*;
use rand::seq::SliceRandom;

use OperatorKind::*;

fn spec(kind: OperatorKind) -> OperatorSpec {
    OperatorSpec::new(kind)
}

fn split(kind: SyntheticKind, n: usize, s: u64) -> Dataset {
    let mut rng = seed::stream(s, &[]);
    make_synthetic(kind, n, &mut rng).unwrap().stratified_split(0.75, &mut rng).unwrap()
}

fn combined_tree() -> PipelineTree {
    let left = Node::unary(
        spec(SelectKBest).with_int("k", 2).unwrap(),
        Node::unary(spec(StandardScaler), Node::Leaf),
    );
    let right = Node::unary(spec(PolynomialFeatures), Node::Leaf);
    PipelineTree::new(Node::unary(
        spec(LogisticRegression).with_float("C", 0.5).unwrap(),
        Node::combine(left, right),
    ))
}

#[test]
fn validate_examples() {
    let limits = TreeLimits::default();
    assert!(validate(&PipelineTree::classifier(spec(DecisionTree)), &limits).is_ok());
    let bad = PipelineTree::new(Node::unary(spec(StandardScaler), Node::Leaf));
    assert_eq!(
        validate(&bad, &limits),
        Err(vec![Violation::RootNotClassifier("StandardScaler".into())])
    );
    let combined = PipelineTree::new(Node::unary(spec(RandomForest), Node::combine(Node::Leaf, Node::Leaf)));
    assert!(validate(&combined, &limits).is_ok());
    assert_eq!(combined.operator_count(), 2);
    assert_eq!(combined.depth(), 2);
}

#[test]
fn validate_reports_every_violation() {
    let mut node = Node::Leaf;
    for _ in 0..11 {
        node = Node::unary(spec(StandardScaler), node);
    }
    let violations = validate(&PipelineTree::new(node), &TreeLimits::default()).unwrap_err();
    assert_eq!(violations.len(), 2);
    assert!(matches!(violations[1], Violation::TooDeep { depth: 11, max: 10 }));
    let small = TreeLimits { max_depth: 10, max_operators: 1 };
    let v = validate(&combined_tree(), &small).unwrap_err();
    assert_eq!(v, vec![Violation::TooManyOperators { count: 5, max: 1 }]);
}

#[test]
fn one_nn_on_separable_data() {
    let d = split(SyntheticKind::Separable2d, 200, 1);
    let t = PipelineTree::classifier(spec(KNearestNeighbor).with_int("k", 1).unwrap());
    let f = evaluate(&t, &d, 0, &TreeLimits::default()).unwrap();
    assert!(f.accuracy >= 0.95, "{}", f.accuracy);
    assert_eq!(f.operators, 1);
}

#[test]
fn stump_on_parity_is_chance() {
    let d = split(SyntheticKind::Parity(3), 400, 2);
    let t = PipelineTree::classifier(spec(DecisionTree).with_int("max_depth", 1).unwrap());
    let f = evaluate(&t, &d, 0, &TreeLimits::default()).unwrap();
    assert!((f.accuracy - 0.5).abs() <= 0.15, "{}", f.accuracy);
}

#[test]
fn operator_failure_scores_zero() {
    let mut rng = seed::stream(3, &[]);
    let columns: Vec<Vec<f64>> = (0..6).map(|_| (0..40).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let names = (0..6).map(|i| format!("x{i}")).collect();
    let y = (0..40).map(|i| i % 2).collect();
    let d = Dataset::new(columns, names, y, crate::dataset::LabelDictionary::new("class", vec!["a".into(), "b".into()]))
        .unwrap()
        .stratified_split(0.75, &mut rng)
        .unwrap();
    let t = PipelineTree::new(Node::unary(
        spec(DecisionTree),
        Node::unary(
            spec(SelectKBest).with_int("k", 100).unwrap(),
            Node::unary(spec(PolynomialFeatures), Node::unary(spec(PolynomialFeatures), Node::Leaf)),
        ),
    ));
    assert!(matches!(
        execute(&t, &d, 0),
        Err(ExecutionError::Operator(f)) if matches!(f.cause, FailureCause::TooManyColumns(_))
    ));
    assert_eq!(evaluate(&t, &d, 0, &TreeLimits::default()).unwrap(), Fitness { accuracy: 0.0, operators: 4 });
}

#[test]
fn invalid_trees_are_errors() {
    let d = split(SyntheticKind::Xor, 40, 4);
    let bad = PipelineTree::new(Node::unary(spec(StandardScaler), Node::Leaf));
    assert!(matches!(evaluate(&bad, &d, 0, &TreeLimits::default()), Err(EvalError::InvalidTree(_))));
}

#[test]
fn chain_examples() {
    let t = PipelineTree::new(Node::unary(spec(KNearestNeighbor), Node::unary(spec(SelectKBest), Node::Leaf)));
    assert_eq!(extract_chains(&t), vec![vec![SelectKBest, KNearestNeighbor]]);
    let t = PipelineTree::new(Node::unary(
        spec(RandomForest),
        Node::combine(Node::Leaf, Node::unary(spec(StandardScaler), Node::Leaf)),
    ));
    assert_eq!(extract_chains(&t), vec![vec![RandomForest], vec![StandardScaler, RandomForest]]);
    assert_eq!(extract_chains(&PipelineTree::classifier(spec(DecisionTree))), vec![vec![DecisionTree]]);
}

#[test]
fn serialization_round_trip() {
    let t = combined_tree();
    let text = serialize(&t);
    assert_eq!(
        text,
        "LogisticRegression(C=0.5, CombineDFs(SelectKBest(k=2, StandardScaler(INPUT)), PolynomialFeatures(INPUT)))"
    );
    assert_eq!(deserialize(&text).unwrap(), t);
    assert_eq!(t.to_string(), text);
}

#[test]
fn alias_tokens_parse() {
    let t = deserialize("XGBClassifier(n_estimators=20, learning_rate=0.1, max_depth=3, INPUT)").unwrap();
    assert_eq!(t.root_kind(), Some(GradientBoosting));
    let t = deserialize("KNearestNeighborClassifier(k=3, INPUT)").unwrap();
    assert_eq!(t.root_kind(), Some(KNearestNeighbor));
}

#[test]
fn parse_errors_carry_positions() {
    let err = deserialize("RandomForest(n_estimators=10, FooBar(INPUT))").unwrap_err();
    assert_eq!(err.position, 30);
    assert_eq!(err.kind, ParseErrorKind::UnknownKind("FooBar".into()));
    assert!(err.to_string().contains("FooBar"));
    let err = deserialize("DecisionTree(max_depth=99, INPUT)").unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::Schema(SpecError::OutOfRange { .. })));
    let err = deserialize("DecisionTree(max_depth=x1, INPUT)").unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::Unexpected { .. }));
    let err = deserialize("DecisionTree(max_depth=5, INPUT").unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::UnexpectedEnd(_)));
    let err = deserialize("DecisionTree(max_depth=5, INPUT) extra").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::Trailing("extra".into()));
    let err = deserialize("DecisionTree(INPUT)").unwrap_err();
    assert!(matches!(err.kind, ParseErrorKind::Schema(SpecError::MissingParam { .. })));
}

#[test]
fn export_examples() {
    let minimal = export_readable(&PipelineTree::classifier(spec(DecisionTree)));
    assert_eq!(minimal, "DecisionTree max_depth=5\n");
    let text = export_readable(&combined_tree());
    assert_eq!(
        text,
        "LogisticRegression C=0.5\n  CombineDFs\n    branch 1:\n      SelectKBest k=2\n        StandardScaler\n    branch 2:\n      PolynomialFeatures\n"
    );
    let gb = export_readable(&PipelineTree::classifier(spec(GradientBoosting)));
    for name in ["n_estimators=50", "learning_rate=0.1", "max_depth=5"] {
        assert!(gb.contains(name), "{gb}");
    }
    let leaves = export_readable(&PipelineTree::new(Node::unary(spec(DecisionTree), Node::combine(Node::Leaf, Node::Leaf))));
    assert_eq!(leaves.matches("INPUT").count(), 2);
}

#[test]
fn fitness_is_cleared_on_change() {
    let t = PipelineTree::classifier(spec(DecisionTree));
    let mut ind = Individual::evaluated(t.clone(), Fitness { accuracy: 0.7, operators: 1 });
    ind.set_tree(t);
    assert!(ind.fitness().is_some());
    ind.set_tree(PipelineTree::classifier(spec(RandomForest)));
    assert!(ind.fitness().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_random_trees(s in any::<u64>()) {
        let t = random_tree(&mut seed::stream(s, &[]));
        prop_assert_eq!(deserialize(&serialize(&t)).unwrap(), t);
    }

    #[test]
    fn chains_match_leaves(s in any::<u64>()) {
        let t = random_tree(&mut seed::stream(s, &[]));
        let chains = extract_chains(&t);
        prop_assert_eq!(chains.len(), t.root().leaf_count());
        let root = t.root_kind().unwrap();
        prop_assert!(chains.iter().all(|c| c.last() == Some(&root)));
    }

    /// Shuffling the Test labels leaves the pipeline output untouched.
    #[test]
    fn test_labels_are_not_read(s in any::<u64>()) {
        let mut rng = seed::stream(s, &[7]);
        let d = split(SyntheticKind::Xor, 60, s);
        let t = random_tree(&mut rng);
        let mut labels = d.class_labels().to_vec();
        let test: Vec<usize> = d.indices_in(Group::Test);
        let mut shuffled: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
        shuffled.shuffle(&mut rng);
        for (&i, &c) in test.iter().zip(&shuffled) {
            labels[i] = 1 - c;
        }
        let scrambled = d.with_class_labels(labels).unwrap();
        match (execute(&t, &d, s), execute(&t, &scrambled, s)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.columns(), b.columns());
                prop_assert_eq!(a.guess_labels(), b.guess_labels());
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "only one run failed"),
        }
    }

    #[test]
    fn evaluation_is_deterministic(s in any::<u64>()) {
        let d = split(SyntheticKind::Separable2d, 60, s);
        let t = random_tree(&mut seed::stream(s, &[8]));
        let limits = TreeLimits::default();
        let a = evaluate(&t, &d, s, &limits).unwrap();
        prop_assert_eq!(a, evaluate(&t, &d, s, &limits).unwrap());
        prop_assert_eq!(a.operators, t.operator_count());
        prop_assert!((0.0..=1.0).contains(&a.accuracy));
    }
}
