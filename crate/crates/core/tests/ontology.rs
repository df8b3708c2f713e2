use std::path::PathBuf;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use sxacml::ontology::{load_document, serialize_document, KnowledgeBase, OntologyError};
use sxacml_oracle::generate::{random_document, Signature};

fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures/ontologies")
            .join(name),
    )
    .unwrap()
}

const FIXTURES: [&str; 6] = [
    "aco.json",
    "fitness.json",
    "privacy.json",
    "mapping.json",
    "sally.json",
    "extra/sally-deny-police.json",
];

#[test]
fn fixture_documents_round_trip() {
    for name in FIXTURES {
        let kb = load_document(&fixture(name)).unwrap();
        let text = serialize_document(&kb);
        assert_eq!(load_document(text.as_bytes()).unwrap(), kb, "{name}");
        assert_eq!(serialize_document(&load_document(text.as_bytes()).unwrap()), text);
    }
}

#[test]
fn merge_is_commutative_associative_and_idempotent() {
    let kbs: Vec<KnowledgeBase> = FIXTURES[..5]
        .iter()
        .map(|n| load_document(&fixture(n)).unwrap())
        .collect();
    let (a, b, c) = (&kbs[0], &kbs[1], &kbs[3]);
    assert_eq!(a.merge(b).unwrap(), b.merge(a).unwrap());
    assert_eq!(
        a.merge(&b.merge(c).unwrap()).unwrap(),
        a.merge(b).unwrap().merge(c).unwrap()
    );
    assert_eq!(a.merge(a).unwrap(), *a);
    assert_eq!(a.merge(&KnowledgeBase::empty()).unwrap(), *a);
    let all = kbs
        .iter()
        .try_fold(KnowledgeBase::empty(), |acc, kb| acc.merge(kb))
        .unwrap();
    assert!(all.len() <= kbs.iter().map(KnowledgeBase::len).sum());
}

#[test]
fn conflicting_prefixes_do_not_merge() {
    let a = load_document(br#"{"prefixes": {"ex": "urn:a#"}, "classes": ["ex:A"]}"#).unwrap();
    let b = load_document(br#"{"prefixes": {"ex": "urn:b#"}, "classes": ["ex:A"]}"#).unwrap();
    assert!(matches!(a.merge(&b), Err(OntologyError::PrefixConflict { .. })));
}

#[test]
fn syntax_errors_carry_positions() {
    match load_document(b"{\n  \"classes\": [1,\n") {
        Err(OntologyError::Syntax { line, .. }) => assert!(line >= 2),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_documents_round_trip(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sig = Signature::random(&mut rng);
        let doc = random_document(&mut rng, &sig);
        let kb = load_document(doc.to_string().as_bytes()).unwrap();
        let again = load_document(serialize_document(&kb).as_bytes()).unwrap();
        prop_assert_eq!(again, kb);
    }
}
