use proptest::prelude::*;

use super::*;
use crate::functions::FunctionRegistry;
use crate::ontology::Iri;

use DecisionValue::{Deny, Indeterminate, NotApplicable, Permit};

fn iri(s: &str) -> Iri {
    Iri::new(format!("urn:t:{s}")).unwrap()
}

fn d(v: DecisionValue) -> Decision {
    v.into()
}

fn values(ds: &[Decision]) -> Vec<DecisionValue> {
    ds.iter().map(Decision::value).collect()
}

fn no_attributes(_: &AttributeDesignator) -> Result<Vec<AttributeValue>, ResolveError> {
    Ok(Vec::new())
}

fn rule(id: &str, effect: Effect, condition: Option<Expr>) -> Rule {
    Rule {
        id: id.into(),
        effect,
        target: Vec::new(),
        condition,
    }
}

#[test]
fn combine_defining_cases() {
    use CombiningAlgorithm::*;
    assert_eq!(combine(DenyOverrides, &[d(Permit), d(Deny)]).value(), Deny);
    assert_eq!(
        combine(FirstApplicable, &[d(NotApplicable), d(Permit), d(Deny)]).value(),
        Permit
    );
    for alg in CombiningAlgorithm::ALL {
        assert_eq!(combine(alg, &[]).value(), NotApplicable);
    }
    // legal policy first, preference second
    assert_eq!(combine(FirstApplicable, &[d(Permit), d(Deny)]).value(), Permit);
}

#[test]
fn indeterminate_always_has_status() {
    let combined = combine(
        CombiningAlgorithm::DenyOverrides,
        &[Decision::indeterminate("boom"), d(Permit)],
    );
    assert_eq!(combined.value(), Indeterminate);
    assert_eq!(combined.status(), Some("boom"));
    assert!(Decision::new(Indeterminate, None).status().is_some());
}

#[test]
fn unconditional_rule_yields_its_effect() {
    let t = Expr::Constant(AttributeValue::Boolean(true));
    for (effect, expected) in [(Effect::Permit, Permit), (Effect::Deny, Deny)] {
        assert_eq!(
            evaluate_rule(&rule("r", effect, None), &no_attributes).value(),
            expected
        );
        assert_eq!(
            evaluate_rule(&rule("r", effect, Some(t.clone())), &no_attributes).value(),
            expected
        );
    }
    let f = Expr::Constant(AttributeValue::Boolean(false));
    assert_eq!(
        evaluate_rule(&rule("r", Effect::Permit, Some(f)), &no_attributes).value(),
        NotApplicable
    );
}

#[test]
fn class_id_bag_contains_permitted_request() {
    let class_id = AttributeDesignator::new(
        Category::Resource,
        Iri::new(crate::vocab::REQUEST_CLASS_ID).unwrap(),
        ValueKind::Iri,
    );
    let r = rule(
        "permitted",
        Effect::Permit,
        Some(Expr::apply(
            "fn:iri-bag-contains",
            vec![
                Expr::Designator(class_id),
                Expr::Constant(AttributeValue::Iri(iri("PermittedRequest"))),
            ],
        )),
    );
    let classes = |_: &AttributeDesignator| {
        Ok(["Request", "PermittedRequest", "HealthCenterPermission"]
            .iter()
            .map(|c| AttributeValue::Iri(iri(c)))
            .collect())
    };
    assert_eq!(evaluate_rule(&r, &classes).value(), Permit);
    assert_eq!(evaluate_rule(&r, &no_attributes).value(), NotApplicable);
}

#[test]
fn missing_required_attribute_is_indeterminate() {
    let required = AttributeDesignator::new(Category::Subject, iri("role"), ValueKind::String).required();
    let r = Rule {
        id: "r".into(),
        effect: Effect::Permit,
        target: vec![Match {
            designator: required.clone(),
            matcher: "fn:string-equal".into(),
            value: AttributeValue::String("admin".into()),
        }],
        condition: None,
    };
    let decision = evaluate_rule(&r, &no_attributes);
    assert_eq!(decision.value(), Indeterminate);
    assert!(decision.status().unwrap().contains("missing attribute"));

    // resolver failure without must-be-present reads as an empty bag
    let failing = |_: &AttributeDesignator| Err(ResolveError("offline".into()));
    let optional = Rule {
        target: vec![Match {
            designator: AttributeDesignator::new(Category::Subject, iri("role"), ValueKind::String),
            ..r.target[0].clone()
        }],
        ..r.clone()
    };
    assert_eq!(evaluate_rule(&optional, &failing).value(), NotApplicable);
    assert_eq!(evaluate_rule(&r, &failing).value(), Indeterminate);
}

#[test]
fn unknown_function_is_indeterminate() {
    let r = rule("r", Effect::Permit, Some(Expr::apply("fn:nope", vec![])));
    let decision = evaluate_rule(&r, &no_attributes);
    assert_eq!(decision.value(), Indeterminate);
    assert!(decision.status().unwrap().contains("unknown function"));
}

#[test]
fn empty_root_is_not_applicable() {
    assert_eq!(
        evaluate_policy_tree(&PolicySet::empty("root"), &no_attributes).value(),
        NotApplicable
    );
}

#[test]
fn validate_reports_duplicates_and_type_errors() {
    let policy = Policy {
        id: "p".into(),
        target: vec![],
        combining: CombiningAlgorithm::DenyOverrides,
        rules: vec![
            rule("a", Effect::Permit, Some(Expr::Constant(AttributeValue::Integer(1)))),
            rule("a", Effect::Deny, None),
        ],
    };
    let mut set = PolicySet::empty("root");
    set.children.push(PolicyNode::Policy(policy.clone()));
    set.children.push(PolicyNode::Policy(policy));
    let errors = set.validate(FunctionRegistry::standard());
    assert!(errors
        .iter()
        .any(|e| matches!(e, PolicyError::DuplicateId { id, .. } if id == "p")));
    assert!(errors
        .iter()
        .any(|e| matches!(e, PolicyError::DuplicateId { id, .. } if id == "a")));
    assert!(errors.iter().any(|e| matches!(e, PolicyError::Type { .. })));
}

#[test]
fn trace_records_rule_decisions_with_path() {
    let mut set = PolicySet::empty("root");
    set.children.push(PolicyNode::Policy(Policy {
        id: "prefs".into(),
        target: vec![],
        combining: CombiningAlgorithm::DenyOverrides,
        rules: vec![rule("allow", Effect::Permit, None)],
    }));
    let evaluator = Evaluator::new(FunctionRegistry::standard(), &no_attributes).traced();
    assert_eq!(evaluator.evaluate_tree(&set).value(), Permit);
    let trace = evaluator.into_trace();
    assert_eq!(trace.len(), 1);
    assert_eq!(trace[0].to_string(), "root/prefs/allow -> Permit");
}

// Random trees against an eager reference evaluator.

#[derive(Clone, Debug)]
enum Leaf {
    True,
    False,
    Error,
    /// matches when the "flag" subject attribute equals the value
    Flag(bool),
}

fn leaf_expr(leaf: &Leaf) -> Expr {
    match leaf {
        Leaf::True => Expr::Constant(AttributeValue::Boolean(true)),
        Leaf::False => Expr::Constant(AttributeValue::Boolean(false)),
        Leaf::Error => Expr::apply(
            "fn:boolean-one-and-only",
            vec![Expr::Designator(AttributeDesignator::new(
                Category::Environment,
                iri("absent"),
                ValueKind::Boolean,
            ))],
        ),
        Leaf::Flag(v) => Expr::apply(
            "fn:boolean-bag-contains",
            vec![
                Expr::Designator(AttributeDesignator::new(
                    Category::Subject,
                    iri("flag"),
                    ValueKind::Boolean,
                )),
                Expr::Constant(AttributeValue::Boolean(*v)),
            ],
        ),
    }
}

fn leaf_value(leaf: &Leaf, flag: bool) -> Option<bool> {
    match leaf {
        Leaf::True => Some(true),
        Leaf::False => Some(false),
        Leaf::Error => None,
        Leaf::Flag(v) => Some(*v == flag),
    }
}

fn reference_combine(alg: CombiningAlgorithm, ds: &[DecisionValue]) -> DecisionValue {
    let count = |v| ds.iter().filter(|d| **d == v).count();
    match alg {
        CombiningAlgorithm::DenyOverrides if count(Deny) > 0 => Deny,
        CombiningAlgorithm::PermitOverrides if count(Permit) > 0 => Permit,
        CombiningAlgorithm::FirstApplicable => *ds.iter().find(|d| **d != NotApplicable).unwrap_or(&NotApplicable),
        _ if count(Indeterminate) > 0 => Indeterminate,
        CombiningAlgorithm::DenyOverrides if count(Permit) > 0 => Permit,
        CombiningAlgorithm::PermitOverrides if count(Deny) > 0 => Deny,
        _ => NotApplicable,
    }
}

#[derive(Clone, Debug)]
enum Tree {
    Set(CombiningAlgorithm, Option<bool>, Vec<Tree>),
    Policy(CombiningAlgorithm, Option<bool>, Vec<(Effect, Option<Leaf>)>),
}

fn target_for(t: Option<bool>) -> Vec<Match> {
    t.map(|v| Match {
        designator: AttributeDesignator::new(Category::Subject, iri("flag"), ValueKind::Boolean),
        matcher: "fn:boolean-equal".into(),
        value: AttributeValue::Boolean(v),
    })
    .into_iter()
    .collect()
}

fn build(tree: &Tree, id: String) -> PolicyNode {
    match tree {
        Tree::Set(alg, t, children) => PolicyNode::Set(PolicySet {
            id: id.clone(),
            target: target_for(*t),
            combining: *alg,
            children: children
                .iter()
                .enumerate()
                .map(|(i, c)| build(c, format!("{id}.{i}")))
                .collect(),
        }),
        Tree::Policy(alg, t, rules) => PolicyNode::Policy(Policy {
            id,
            target: target_for(*t),
            combining: *alg,
            rules: rules
                .iter()
                .enumerate()
                .map(|(i, (effect, leaf))| rule(&format!("r{i}"), *effect, leaf.as_ref().map(leaf_expr)))
                .collect(),
        }),
    }
}

fn reference(tree: &Tree, flag: bool) -> DecisionValue {
    let (alg, t, ds) = match tree {
        Tree::Set(alg, t, children) => (alg, t, children.iter().map(|c| reference(c, flag)).collect::<Vec<_>>()),
        Tree::Policy(alg, t, rules) => (
            alg,
            t,
            rules
                .iter()
                .map(
                    |(effect, leaf)| match leaf.as_ref().map_or(Some(true), |l| leaf_value(l, flag)) {
                        None => Indeterminate,
                        Some(false) => NotApplicable,
                        Some(true) if *effect == Effect::Permit => Permit,
                        Some(true) => Deny,
                    },
                )
                .collect(),
        ),
    };
    if matches!(t, Some(v) if *v != flag) {
        return NotApplicable;
    }
    reference_combine(*alg, &ds)
}

fn algorithm() -> impl Strategy<Value = CombiningAlgorithm> {
    prop::sample::select(CombiningAlgorithm::ALL.to_vec())
}

fn leaf() -> impl Strategy<Value = Option<Leaf>> {
    prop_oneof![
        Just(None),
        Just(Some(Leaf::True)),
        Just(Some(Leaf::False)),
        Just(Some(Leaf::Error)),
        any::<bool>().prop_map(|b| Some(Leaf::Flag(b))),
    ]
}

fn effect() -> impl Strategy<Value = Effect> {
    prop_oneof![Just(Effect::Permit), Just(Effect::Deny)]
}

fn tree() -> impl Strategy<Value = Tree> {
    let policy = (
        algorithm(),
        any::<Option<bool>>(),
        prop::collection::vec((effect(), leaf()), 0..4),
    )
        .prop_map(|(a, t, rules)| Tree::Policy(a, t, rules));
    // depth <= 3: set -> set -> policy
    policy.prop_recursive(2, 16, 4, |inner| {
        (algorithm(), any::<Option<bool>>(), prop::collection::vec(inner, 0..4))
            .prop_map(|(a, t, children)| Tree::Set(a, t, children))
    })
}

fn decision_value() -> impl Strategy<Value = DecisionValue> {
    prop::sample::select(DecisionValue::ALL.to_vec())
}

proptest! {
    #[test]
    fn random_trees_agree_with_reference(t in tree(), flag in any::<bool>()) {
        let root = match build(&t, "root".into()) {
            PolicyNode::Set(s) => s,
            PolicyNode::Policy(p) => {
                let mut s = PolicySet::empty("root");
                s.children.push(PolicyNode::Policy(p));
                s
            }
        };
        prop_assert!(root.validate(FunctionRegistry::standard()).is_empty());
        let resolver = move |d: &AttributeDesignator| -> Result<Vec<AttributeValue>, ResolveError> {
            if d.attribute_id == iri("flag") {
                Ok(vec![AttributeValue::Boolean(flag)])
            } else {
                Ok(vec![])
            }
        };
        let expected = match &t {
            Tree::Policy(..) => reference_combine(CombiningAlgorithm::FirstApplicable, &[reference(&t, flag)]),
            Tree::Set(..) => reference(&t, flag),
        };
        prop_assert_eq!(evaluate_policy_tree(&root, &resolver).value(), expected);
    }

    #[test]
    fn deny_overrides_is_deny_iff_deny_present(ds in prop::collection::vec(decision_value(), 0..6)) {
        let decisions: Vec<Decision> = ds.iter().map(|v| d(*v)).collect();
        prop_assert_eq!(combine(CombiningAlgorithm::DenyOverrides, &decisions).value() == Deny, ds.contains(&Deny));
        prop_assert_eq!(combine(CombiningAlgorithm::PermitOverrides, &decisions).value() == Permit, ds.contains(&Permit));
    }

    #[test]
    fn first_applicable_ignores_trailing_not_applicable(ds in prop::collection::vec(decision_value(), 0..6), extra in 0usize..4) {
        let decisions: Vec<Decision> = ds.iter().map(|v| d(*v)).collect();
        let mut padded = decisions.clone();
        padded.extend(std::iter::repeat_n(d(NotApplicable), extra));
        prop_assert_eq!(
            combine(CombiningAlgorithm::FirstApplicable, &decisions),
            combine(CombiningAlgorithm::FirstApplicable, &padded)
        );
    }

    #[test]
    fn override_algorithms_ignore_order(ds in prop::collection::vec(decision_value(), 0..6).prop_shuffle()) {
        let decisions: Vec<Decision> = ds.iter().map(|v| d(*v)).collect();
        let mut reversed = decisions.clone();
        reversed.reverse();
        for alg in [CombiningAlgorithm::DenyOverrides, CombiningAlgorithm::PermitOverrides] {
            prop_assert_eq!(combine(alg, &decisions).value(), combine(alg, &reversed).value());
        }
        let _ = values(&decisions);
    }

    #[test]
    fn rule_never_returns_opposite_effect(e in effect(), l in leaf(), flag in any::<bool>()) {
        let r = rule("r", e, l.as_ref().map(leaf_expr));
        let resolver = move |_: &AttributeDesignator| -> Result<Vec<AttributeValue>, ResolveError> {
            Ok(vec![AttributeValue::Boolean(flag)])
        };
        let out = evaluate_rule(&r, &resolver).value();
        match e {
            Effect::Permit => prop_assert_ne!(out, Deny),
            Effect::Deny => prop_assert_ne!(out, Permit),
        }
    }
}
