use std::collections::BTreeSet;
use std::path::PathBuf;

use serde_json::Value as Json;
use sxacml::fixtures::{load_fixture_stack, FixtureStack};
use sxacml::ontology::{load_document, serialize_document, GeoPoint, Iri, KnowledgeBase};
use sxacml::pip::{build_request_ontology, RequestOntology};
use sxacml::policy::{AttributeValue, Category, ValueKind};
use sxacml::request::RequestContext;
use sxacml::vocab::{ACO, CLASS_ID, FIT, REQUEST_CLASS_ID};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn stack() -> FixtureStack {
    load_fixture_stack(fixtures().join("manifest.json")).unwrap()
}

fn iri(s: impl Into<String>) -> Iri {
    Iri::new(s).unwrap()
}

fn iris(bag: Vec<AttributeValue>) -> BTreeSet<String> {
    bag.into_iter()
        .map(|v| match v {
            AttributeValue::Iri(i) => i.to_string(),
            other => panic!("not an iri: {other:?}"),
        })
        .collect()
}

/// Statements the request adds, counted straight from the request document:
/// one request typing, then per category a typing and a link, then one
/// statement per attribute.
fn expected_request_statements(doc: &Json) -> usize {
    let categories = doc.as_object().unwrap();
    1 + categories
        .values()
        .filter(|a| !a.as_array().unwrap().is_empty())
        .count()
        * 2
        + categories.values().map(|a| a.as_array().unwrap().len()).sum::<usize>()
}

#[test]
fn uc1_request_ontology_shape() {
    let stack = stack();
    let path = fixtures().join("scenarios/uc1/request.json");
    let doc: Json = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let scenario = stack.scenario("uc1").unwrap();
    let ro = build_request_ontology(&scenario.request, &stack.knowledge_base, &KnowledgeBase::empty()).unwrap();

    assert_eq!(
        ro.kb().len(),
        stack.knowledge_base.len() + expected_request_statements(&doc)
    );
    assert_eq!(ro.category_individuals().len(), 3);
    let fresh: BTreeSet<&Iri> = ro
        .category_individuals()
        .values()
        .chain([ro.request_individual()])
        .collect();
    assert_eq!(fresh.len(), 4);
    for ind in &fresh {
        assert!(!stack.knowledge_base.has_individual(ind), "{ind} collides");
        assert!(ind.as_str().starts_with("urn:req:"));
    }
    let links = ro
        .kb()
        .object_assertions_of(ro.request_individual())
        .filter(|(p, _)| p.as_str().starts_with(&format!("{ACO}has")))
        .count();
    assert_eq!(links, 3);
    assert!(ro.skipped_attributes().is_empty());
}

#[test]
fn uc1_request_individual_is_classified_as_permitted() {
    let stack = stack();
    let ctx = &stack.scenario("uc1").unwrap().request;
    let check = |resource: &str| {
        let ro = RequestOntology::build(
            &ctx.for_resource(&iri(format!("{FIT}{resource}"))),
            &stack.knowledge_base,
        );
        iris(
            ro.find_attribute(Category::Resource, &iri(REQUEST_CLASS_ID), ValueKind::Iri)
                .unwrap(),
        )
    };
    let permitted = check("MonthlyDistance-2019-05");
    for class in ["Request", "PermittedRequest", "HealthCenterPermission"] {
        assert!(permitted.contains(&format!("{ACO}{class}")), "{class}");
    }
    let raw = check("RunDistance-1");
    assert!(raw.contains(&format!("{ACO}Request")));
    assert!(!raw.contains(&format!("{ACO}PermittedRequest")));
}

#[test]
fn uc2_location_attributes_come_from_the_domain() {
    let stack = stack();
    let ctx = &stack.scenario("uc2").unwrap().request;
    let ro = RequestOntology::build(
        &ctx.for_resource(&iri(format!("{FIT}Location-1"))),
        &stack.knowledge_base,
    );
    let point = ro
        .find_attribute(
            Category::Resource,
            &iri(format!("{FIT}locationPoint")),
            ValueKind::GeoPoint,
        )
        .unwrap();
    assert_eq!(
        point,
        vec![AttributeValue::GeoPoint(GeoPoint::new(52.2342, 21.0122).unwrap())]
    );
    let times = ro
        .find_attribute(
            Category::Resource,
            &iri(format!("{FIT}locationTime")),
            ValueKind::DateTime,
        )
        .unwrap();
    assert_eq!(times.len(), 1);

    // declared but never asserted for a location
    let steps = ro
        .find_attribute(Category::Resource, &iri(format!("{FIT}steps")), ValueKind::Integer)
        .unwrap();
    assert!(steps.is_empty());
    // wrong kind for the stored value
    assert!(ro
        .find_attribute(
            Category::Resource,
            &iri(format!("{FIT}locationPoint")),
            ValueKind::String
        )
        .is_err());
    // not a property at all
    assert!(ro
        .find_attribute(Category::Resource, &iri("urn:x:unknown"), ValueKind::String)
        .is_err());
    assert_eq!(ro.query_count(), 5);
}

#[test]
fn empty_context_has_only_the_request_individual() {
    let stack = stack();
    let ro = RequestOntology::build(&RequestContext::new(), &stack.knowledge_base);
    assert!(ro.category_individuals().is_empty());
    assert_eq!(ro.kb().len(), stack.knowledge_base.len() + 1);
    let bag = ro
        .find_attribute(Category::Subject, &iri(CLASS_ID), ValueKind::Iri)
        .unwrap();
    assert!(bag.is_empty());
}

#[test]
fn same_context_builds_isomorphic_ontologies() {
    let stack = stack();
    let ctx = &stack.scenario("uc2").unwrap().request;
    let a = RequestOntology::build_named(ctx, &stack.knowledge_base, "first");
    let b = RequestOntology::build_named(ctx, &stack.knowledge_base, "second");
    let renamed = serialize_document(a.kb()).replace("urn:req:first:", "urn:req:second:");
    assert_eq!(&load_document(renamed.as_bytes()).unwrap(), b.kb());
}

#[test]
fn class_bags_cover_asserted_classes() {
    let stack = stack();
    let ctx = &stack.scenario("uc2").unwrap().request;
    let ro = RequestOntology::build(ctx, &stack.knowledge_base);
    for category in [Category::Subject, Category::Resource, Category::Action] {
        let asserted: BTreeSet<String> = ctx
            .values(category, &iri(CLASS_ID))
            .into_iter()
            .map(|v| match v {
                AttributeValue::Iri(i) => i.to_string(),
                _ => unreachable!(),
            })
            .collect();
        let bag = iris(ro.find_attribute(category, &iri(CLASS_ID), ValueKind::Iri).unwrap());
        assert!(bag.is_superset(&asserted), "{category}");
        assert!(bag.len() > asserted.len(), "{category} gains superclasses");
    }
}

#[test]
fn undeclared_request_attributes_are_skipped() {
    let stack = stack();
    let ctx =
        RequestContext::from_json(br#"{"subject": [{"id": "<urn:x:nickname>", "kind": "string", "value": "Ann"}]}"#)
            .unwrap();
    let ro = RequestOntology::build(&ctx, &stack.knowledge_base);
    assert_eq!(ro.skipped_attributes().len(), 1);
    assert_eq!(ro.kb().len(), stack.knowledge_base.len() + 3);
}
