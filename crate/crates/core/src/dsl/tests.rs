use super::*;
use crate::functions::{AND, GEO_WITHIN_DISTANCE, TIME_WITHIN_WINDOW};
use crate::policy::{AttributeValue, CombiningAlgorithm, Effect, Expr, PolicyNode, ValueKind};

const UC2: &str = r#"
// Police may read locations near the event, around its time.
policyset legal {
  policy police-event-access {
    target clause subject.aco:classId:iri == org:PoliceDepartment
    target clause action.aco:classId:iri == aco:Read
    apply denyOverrides
    rule near-event {
      permit
      condition fn:geo-within-distance(resource.fit:locationPoint:geoPoint, environment.aco:eventLocation:geoPoint, 1000.0)
        and fn:time-within-window(resource.fit:locationTime:dateTime, environment.aco:eventTime:dateTime, duration"PT1H")
    }
  }
}
"#;

fn parse_ok(text: &str) -> PolicySet {
    let outcome = parse_policy_document(text);
    assert!(
        outcome.errors().next().is_none(),
        "unexpected diagnostics: {:?}",
        outcome.diagnostics
    );
    outcome.policy_set.unwrap()
}

fn first_error(text: &str) -> ParseDiagnostic {
    let outcome = parse_policy_document(text);
    assert!(outcome.policy_set.is_none(), "expected failure for {text:?}");
    outcome.into_result().unwrap_err()
}

#[test]
fn uc2_policy_structure() {
    let ps = parse_ok(UC2);
    assert_eq!(ps.id, "legal");
    let [PolicyNode::Policy(p)] = ps.children.as_slice() else {
        panic!("expected one policy, got {:?}", ps.children);
    };
    assert_eq!(p.combining, CombiningAlgorithm::DenyOverrides);
    assert_eq!(p.target.len(), 2);
    assert_eq!(p.target[0].matcher, "fn:iri-equal");
    let [rule] = p.rules.as_slice() else { panic!() };
    assert_eq!(rule.effect, Effect::Permit);
    let Some(Expr::Apply { function, args }) = &rule.condition else {
        panic!()
    };
    assert_eq!(function, AND);
    let names: Vec<_> = args
        .iter()
        .map(|a| match a {
            Expr::Apply { function, .. } => function.as_str(),
            _ => "",
        })
        .collect();
    assert_eq!(names, [GEO_WITHIN_DISTANCE, TIME_WITHIN_WINDOW]);
    // Bags in scalar positions get a one-and-only wrapper.
    let Expr::Apply { args: geo_args, .. } = &args[0] else {
        panic!()
    };
    assert!(matches!(&geo_args[0], Expr::Apply { function, .. } if function == "fn:geoPoint-one-and-only"));
    assert_eq!(geo_args[2], Expr::Constant(AttributeValue::Double(1000.0)));
    let Expr::Apply { args: time_args, .. } = &args[1] else {
        panic!()
    };
    assert_eq!(time_args[2], Expr::Constant(AttributeValue::Duration(3_600_000)));
}

#[test]
fn uc2_serialization_round_trips() {
    let ps = parse_ok(UC2);
    let text = serialize_policy(&ps);
    assert!(text.contains("1000.0"), "{text}");
    assert!(text.contains("target clause subject.aco:classId:iri == org:PoliceDepartment"));
    let again = parse_ok(&text);
    assert_eq!(again, ps);
    assert_eq!(serialize_policy(&again), text);
}

#[test]
fn empty_document() {
    let outcome = parse_policy_document("");
    assert!(outcome.diagnostics.is_empty());
    let ps = outcome.policy_set.unwrap();
    assert_eq!(ps, PolicySet::empty("root"));
    assert_eq!(ps.combining, CombiningAlgorithm::FirstApplicable);
    assert_eq!(serialize_policy(&ps), "policyset root {\n  apply firstApplicable\n}\n");
    assert_eq!(parse_ok("  // only a comment\n"), ps);
}

#[test]
fn several_items_are_wrapped_in_a_root_set() {
    let ps = parse_ok("policy a { apply permitOverrides } policy b { }");
    assert_eq!(ps.id, "root");
    assert_eq!(ps.children.len(), 2);
    let reparsed = parse_ok(&serialize_policy(&ps));
    assert_eq!(reparsed, ps);
}

#[test]
fn operators_desugar_to_registry_functions() {
    let ps = parse_ok(
        r#"policy p { rule r { deny condition not (subject.<urn:x:age>:integer >= 18 or resource.<urn:x:w>:double < 2) } }"#,
    );
    let PolicyNode::Policy(p) = &ps.children[0] else {
        panic!()
    };
    let cond = p.rules[0].condition.clone().unwrap();
    let age = Expr::apply(
        "fn:integer-one-and-only",
        vec![Expr::Designator(crate::policy::AttributeDesignator::new(
            crate::policy::Category::Subject,
            crate::ontology::Iri::new("urn:x:age").unwrap(),
            ValueKind::Integer,
        ))],
    );
    let Expr::Apply { function, args } = &cond else {
        panic!()
    };
    assert_eq!(function, "fn:not");
    let Expr::Apply { function, args } = &args[0] else {
        panic!()
    };
    assert_eq!(function, "fn:or");
    assert_eq!(
        args[0],
        Expr::apply(
            "fn:integer-greater-than-or-equal",
            vec![age, Expr::Constant(AttributeValue::Integer(18))]
        )
    );
    // The integer literal is promoted to compare with a double.
    let Expr::Apply { args: lt, .. } = &args[1] else {
        panic!()
    };
    assert_eq!(lt[1], Expr::Constant(AttributeValue::Double(2.0)));
}

#[test]
fn prefixes_and_required_designators() {
    let ps = parse_ok(
        "prefix ex = <http://example.org/v#>\npolicy p { rule r { permit target clause resource.ex:kind:string! == \"x\" } }",
    );
    let PolicyNode::Policy(p) = &ps.children[0] else {
        panic!()
    };
    let m = &p.rules[0].target[0];
    assert!(m.designator.must_be_present);
    assert_eq!(m.designator.attribute_id.as_str(), "http://example.org/v#kind");
    // Unknown namespaces serialize in absolute form.
    assert!(serialize_policy(&ps).contains("resource.<http://example.org/v#kind>:string! == \"x\""));
}

#[test]
fn reports_errors_with_spans() {
    let e = first_error("policy p {\n  rule r { permit condition fn:nope(1) }\n}");
    assert!(e.message.contains("unknown function `fn:nope`"), "{e}");
    assert_eq!((e.span.line, e.span.column), (2, 29));

    let e = first_error("policy p { apply mostlyPermit }");
    assert!(e.message.contains("unknown combining algorithm"), "{e}");

    let e = first_error("policy p { rule r { permit } rule r { deny } }");
    assert!(e.message.contains("duplicate id `r`"), "{e}");

    let e = first_error("policy p { rule r { } }");
    assert!(e.message.contains("no effect"), "{e}");

    let e = first_error("policy p { rule r { permit condition subject.<urn:a:b>:string == 3 } }");
    assert!(e.message.contains("cannot compare"), "{e}");

    let e = first_error("policy p { rule r { permit condition \"x\" } }");
    assert!(e.message.contains("expected boolean"), "{e}");

    let e = first_error("policy p { rule r { permit target clause subject.zz:a:string == \"x\" } }");
    assert!(e.message.contains("unknown prefix `zz`"), "{e}");

    let e = first_error("policy p { rule r { permit target clause subject.<urn:a>:string < \"x\" } }");
    assert!(e.message.contains("not defined for string"), "{e}");

    let e = first_error("policy p {");
    assert!(e.message.contains("end of input"), "{e}");
    assert_eq!(e.span.start, 10);

    let outcome = parse_policy_document("policy p { rule r { permit condition subject.<urn:a>:string = \"x\" } }");
    assert!(
        outcome.errors().any(|e| e.message.contains("`==`")),
        "{:?}",
        outcome.diagnostics
    );

    let e = first_error("prefix fn = <urn:f:>");
    assert!(e.message.contains("reserved"), "{e}");
}

#[test]
fn warns_about_unreachable_rules() {
    let outcome = parse_policy_document("policy p { rule a { permit } rule b { deny } }");
    assert!(outcome.policy_set.is_some());
    let [w] = outcome.diagnostics.as_slice() else { panic!() };
    assert_eq!(w.severity, Severity::Warning);
    assert!(w.message.contains("`b`"));
}

#[test]
fn deep_nesting_is_rejected_not_overflowed() {
    for text in [
        format!(
            "policy p {{ rule r {{ permit condition {}true{} }} }}",
            "(".repeat(5000),
            ")".repeat(5000)
        ),
        format!(
            "policy p {{ rule r {{ permit condition {}true }} }}",
            "not ".repeat(5000)
        ),
        format!(
            "policy p {{ rule r {{ permit condition true{} }} }}",
            " and true".repeat(5000)
        ),
        "policyset a { ".repeat(1000),
    ] {
        let e = first_error(&text);
        assert!(e.message.contains("too deeply"), "{e}");
    }
}

#[test]
fn invalid_utf8_is_a_diagnostic() {
    let outcome = parse_policy_bytes(b"policy p \xff{}");
    let e = outcome.into_result().unwrap_err();
    assert_eq!((e.span.start, e.span.end), (9, 10));
}

#[test]
fn literal_forms() {
    let ps = parse_ok(
        r#"policy p { rule r { permit
             target clause environment.<urn:t>:dateTime < dateTime"2019-06-14T23:00:00+02:00"
             target clause environment.<urn:p>:geoPoint == point(52, -21.5)
             target clause environment.<urn:b>:boolean != false
             target clause environment.<urn:s>:string == "tab\there \u{1F600}"
        } }"#,
    );
    let text = serialize_policy(&ps);
    assert!(text.contains(r#"dateTime"2019-06-14T21:00:00.000Z""#), "{text}");
    assert!(text.contains("point(52.0, -21.5)"), "{text}");
    assert!(text.contains(r#""tab\there 😀""#), "{text}");
    assert_eq!(parse_ok(&text), ps);
}
