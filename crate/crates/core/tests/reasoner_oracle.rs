//! The reasoner against a brute-force fixpoint over the same documents.

use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value as Json};
use sxacml::ontology::{load_document, ClassExpression, Iri, KnowledgeBase};
use sxacml::reasoner::{classify, InferredKB};
use sxacml_oracle::generate::{self, Signature};
use sxacml_oracle::BruteForceKb;

fn names(set: BTreeSet<Iri>) -> BTreeSet<String> {
    set.into_iter().map(String::from).collect()
}

/// Parses a standalone expression by wrapping it in a definition.
fn parse_expression(expr: &Json) -> ClassExpression {
    let doc = json!({ "equivalent": [{ "name": "urn:probe:P", "expr": expr }] });
    let kb = load_document(doc.to_string().as_bytes()).unwrap();
    kb.membership_rules()[0].0.clone()
}

fn compare(inferred: &InferredKB, oracle: &BruteForceKb, probes: &[Json]) -> Result<(), String> {
    let kb = inferred.base();
    let classes: BTreeSet<String> = kb.classes().iter().map(|c| c.to_string()).collect();
    if &classes != oracle.classes() {
        return Err(format!("class sets differ: {classes:?} vs {:?}", oracle.classes()));
    }
    for ind in oracle.individuals() {
        let iri = Iri::new(ind.as_str()).unwrap();
        let got = names(inferred.types_of(&iri));
        if got != oracle.types_of(ind) {
            return Err(format!("types_of({ind}): {got:?} vs {:?}", oracle.types_of(ind)));
        }
        for probe in probes {
            let got = inferred.satisfies(&iri, &parse_expression(probe)).unwrap();
            if got != oracle.satisfies(ind, probe) {
                return Err(format!("satisfies({ind}, {probe}): engine says {got}"));
            }
        }
    }
    for class in oracle.classes() {
        let got = names(inferred.instances_of(&Iri::new(class.as_str()).unwrap()));
        if got != oracle.instances_of(class) {
            return Err(format!(
                "instances_of({class}): {got:?} vs {:?}",
                oracle.instances_of(class)
            ));
        }
    }
    Ok(())
}

fn check_seed(seed: u64) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let sig = Signature::random(&mut rng);
    let doc = generate::random_document(&mut rng, &sig);
    assert!(generate::statement_count(&doc) <= generate::MAX_AXIOMS);
    let kb = load_document(doc.to_string().as_bytes()).map_err(|e| format!("{e}\n{doc:#}"))?;
    let inferred = classify(&kb).map_err(|e| e.to_string())?;
    let oracle = BruteForceKb::from_documents([&doc]);
    let probes: Vec<Json> = (0..4).map(|_| generate::expression(&mut rng, &sig, 2)).collect();
    compare(&inferred, &oracle, &probes).map_err(|e| format!("{e}\n{doc:#}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_knowledge_bases_agree(seed in any::<u64>()) {
        check_seed(seed).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn fixture_stack_agrees() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/ontologies");
    let mut docs = Vec::new();
    let mut kb = KnowledgeBase::empty();
    for name in [
        "aco",
        "fitness",
        "privacy",
        "mapping",
        "sally",
        "extra/sally-deny-police",
    ] {
        let bytes = std::fs::read(dir.join(format!("{name}.json"))).unwrap();
        kb = kb.merge(&load_document(&bytes).unwrap()).unwrap();
        docs.push(serde_json::from_slice::<Json>(&bytes).unwrap());
    }
    assert!(kb.individuals().len() <= 50);
    let inferred = classify(&kb).unwrap();
    let oracle = BruteForceKb::from_documents(&docs);
    let fit = "http://sxacml.example.org/ns/fitness#";
    let probes = [
        json!({ "hasValue": { "p": format!("{fit}aggregationPeriod"), "value": { "kind": "string", "value": "monthly" } } }),
        json!({ "data": { "p": format!("{fit}distanceMeters"), "op": ">", "literal": { "kind": "double", "value": 5000.0 } } }),
        json!({ "some": { "p": "http://sxacml.example.org/ns/aco#hasOwner", "expr": { "named": "http://sxacml.example.org/ns/org#Person" } } }),
        json!({ "and": [{ "named": format!("{fit}Location") }, { "named": "http://sxacml.example.org/ns/aco#Resource" }] }),
    ];
    compare(&inferred, &oracle, &probes).unwrap();
}
