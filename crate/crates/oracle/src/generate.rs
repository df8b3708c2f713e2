//! Random ontology documents within fixed size bounds.

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value as Json};

pub const MAX_CLASSES: usize = 20;
pub const MAX_INDIVIDUALS: usize = 20;
pub const MAX_AXIOMS: usize = 60;

const OBJECT_PROPS: [&str; 3] = ["urn:t:p0", "urn:t:p1", "urn:t:p2"];
const INT_PROP: &str = "urn:t:n";
const STR_PROP: &str = "urn:t:s";
const WORDS: [&str; 3] = ["a", "b", "c"];
const OPS: [&str; 6] = ["=", "!=", "<", "<=", ">", ">="];

/// Names used by a generated document.
#[derive(Clone, Debug)]
pub struct Signature {
    pub classes: Vec<String>,
    pub individuals: Vec<String>,
}

impl Signature {
    pub fn random(rng: &mut impl Rng) -> Signature {
        let nc = rng.gen_range(1..=MAX_CLASSES);
        let ni = rng.gen_range(0..=MAX_INDIVIDUALS);
        Signature {
            classes: (0..nc).map(|i| format!("urn:t:C{i}")).collect(),
            individuals: (0..ni).map(|i| format!("urn:t:i{i}")).collect(),
        }
    }
}

/// A document with at most [`MAX_AXIOMS`] statements over `sig`. Cycles in
/// the subclass graph are allowed.
pub fn random_document(rng: &mut impl Rng, sig: &Signature) -> Json {
    let mut statements = 0;
    let mut object_properties = Vec::new();
    for p in OBJECT_PROPS {
        let mut decl = json!({ "name": p });
        if rng.gen_bool(0.3) {
            decl["domain"] = json!(pick(rng, &sig.classes));
        }
        if rng.gen_bool(0.3) {
            decl["range"] = json!(pick(rng, &sig.classes));
        }
        object_properties.push(decl);
        statements += 1;
    }
    let mut int_decl = json!({ "name": INT_PROP, "range": "integer" });
    if rng.gen_bool(0.3) {
        int_decl["domain"] = json!(pick(rng, &sig.classes));
    }
    let data_properties = vec![int_decl, json!({ "name": STR_PROP, "range": "string" })];
    statements += 2;

    let mut classes = Vec::new();
    let mut sub_class_of = Vec::new();
    let mut equivalent = Vec::new();
    let mut defined = std::collections::BTreeSet::new();
    let mut individuals: Vec<(String, Vec<Json>, Vec<Json>)> = sig
        .individuals
        .iter()
        .map(|i| (i.clone(), Vec::new(), Vec::new()))
        .collect();

    let budget = rng.gen_range(statements..=MAX_AXIOMS);
    while statements < budget {
        match rng.gen_range(0..10) {
            0 => classes.push(json!(pick(rng, &sig.classes))),
            1 | 2 => sub_class_of.push(json!([pick(rng, &sig.classes), pick(rng, &sig.classes)])),
            3 => sub_class_of.push(json!([complex_expression(rng, sig, 2), pick(rng, &sig.classes)])),
            4 => {
                let name = pick(rng, &sig.classes);
                if !defined.insert(name.clone()) {
                    continue;
                }
                equivalent.push(json!({ "name": name, "expr": expression(rng, sig, 2) }));
            }
            _ if individuals.is_empty() => continue,
            5 | 6 => {
                let class = pick(rng, &sig.classes);
                individuals.choose_mut(rng).unwrap().1.push(json!(class));
            }
            7 | 8 => {
                let object = pick(rng, &sig.individuals);
                let p = *OBJECT_PROPS.choose(rng).unwrap();
                individuals
                    .choose_mut(rng)
                    .unwrap()
                    .2
                    .push(json!({ "p": p, "o": object }));
            }
            _ => {
                let prop = data_literal(rng);
                individuals.choose_mut(rng).unwrap().2.push(prop);
            }
        }
        statements += 1;
    }

    let individuals: Vec<Json> = individuals
        .into_iter()
        .map(|(name, types, props)| json!({ "name": name, "types": types, "props": props }))
        .collect();
    json!({
        "classes": classes,
        "subClassOf": sub_class_of,
        "equivalent": equivalent,
        "objectProperties": object_properties,
        "dataProperties": data_properties,
        "individuals": individuals,
    })
}

/// A random class expression of at most `depth` nesting levels.
pub fn expression(rng: &mut impl Rng, sig: &Signature, depth: usize) -> Json {
    if depth == 0 || rng.gen_bool(0.3) {
        return json!({ "named": pick(rng, &sig.classes) });
    }
    complex_expression(rng, sig, depth)
}

fn complex_expression(rng: &mut impl Rng, sig: &Signature, depth: usize) -> Json {
    let depth = depth.max(1);
    match rng.gen_range(0..5) {
        0 => {
            let n = rng.gen_range(2..=3);
            json!({ "and": (0..n).map(|_| expression(rng, sig, depth - 1)).collect::<Vec<_>>() })
        }
        1 => json!({ "some": { "p": *OBJECT_PROPS.choose(rng).unwrap(), "expr": expression(rng, sig, depth - 1) } }),
        2 if !sig.individuals.is_empty() => json!({ "hasValue": {
            "p": *OBJECT_PROPS.choose(rng).unwrap(),
            "value": pick(rng, &sig.individuals),
        } }),
        2 => {
            json!({ "hasValue": { "p": STR_PROP, "value": { "kind": "string", "value": *WORDS.choose(rng).unwrap() } } })
        }
        3 => json!({ "data": {
            "p": INT_PROP,
            "op": *OPS.choose(rng).unwrap(),
            "literal": { "kind": "integer", "value": rng.gen_range(-3..=3) },
        } }),
        _ => json!({ "data": {
            "p": STR_PROP,
            "op": *["=", "!="].choose(rng).unwrap(),
            "literal": { "kind": "string", "value": *WORDS.choose(rng).unwrap() },
        } }),
    }
}

fn data_literal(rng: &mut impl Rng) -> Json {
    if rng.gen_bool(0.6) {
        json!({ "p": INT_PROP, "literal": { "kind": "integer", "value": rng.gen_range(-3..=3) } })
    } else {
        json!({ "p": STR_PROP, "literal": { "kind": "string", "value": *WORDS.choose(rng).unwrap() } })
    }
}

fn pick(rng: &mut impl Rng, names: &[String]) -> String {
    names.choose(rng).expect("non-empty name list").clone()
}

/// Number of statements in a document, counted the same way for every
/// section.
pub fn statement_count(doc: &Json) -> usize {
    let len = |k: &str| doc.get(k).and_then(Json::as_array).map_or(0, Vec::len);
    let individual_facts: usize = doc.get("individuals").and_then(Json::as_array).map_or(0, |inds| {
        inds.iter()
            .map(|i| i["types"].as_array().map_or(0, Vec::len) + i["props"].as_array().map_or(0, Vec::len))
            .sum()
    });
    len("classes")
        + len("subClassOf")
        + len("equivalent")
        + len("objectProperties")
        + len("dataProperties")
        + individual_facts
}
