//! Brute-force reference implementations used to cross-check the engine in
//! tests. Nothing here is fast or shares code with the engine: ontologies
//! are read straight from their JSON documents and classified by
//! re-applying every rule until nothing changes.

pub mod generate;

use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value as Json;

const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Great-circle distance in metres between two `(lat, lon)` points.
pub fn haversine_m(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (p1, p2) = (a.0.to_radians(), b.0.to_radians());
    let dp = p2 - p1;
    let dl = (b.1 - a.1).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// `|a - b| <= window`, all in milliseconds.
pub fn within_window_ms(a: i64, b: i64, window: i64) -> bool {
    (a - b).abs() <= window
}

/// Combining algorithms as explicit binary truth tables folded over the
/// children. Decisions are `"Permit"`, `"Deny"`, `"NotApplicable"`,
/// `"Indeterminate"`.
pub mod combining {
    pub const DECISIONS: [&str; 4] = ["Permit", "Deny", "NotApplicable", "Indeterminate"];

    fn idx(d: &str) -> usize {
        DECISIONS.iter().position(|x| *x == d).expect("known decision")
    }

    //            P    D    NA   I
    const DENY_OVERRIDES: [[usize; 4]; 4] = [
        /* P  */ [0, 1, 0, 3],
        /* D  */ [1, 1, 1, 1],
        /* NA */ [0, 1, 2, 3],
        /* I  */ [3, 1, 3, 3],
    ];
    const PERMIT_OVERRIDES: [[usize; 4]; 4] = [
        /* P  */ [0, 0, 0, 0],
        /* D  */ [0, 1, 1, 3],
        /* NA */ [0, 1, 2, 3],
        /* I  */ [0, 3, 3, 3],
    ];
    const FIRST_APPLICABLE: [[usize; 4]; 4] = [
        /* P  */ [0, 0, 0, 0],
        /* D  */ [1, 1, 1, 1],
        /* NA */ [0, 1, 2, 3],
        /* I  */ [3, 3, 3, 3],
    ];

    fn fold(table: &[[usize; 4]; 4], children: &[&str]) -> &'static str {
        DECISIONS[children.iter().fold(2, |acc, d| table[acc][idx(d)])]
    }

    pub fn deny_overrides(children: &[&str]) -> &'static str {
        fold(&DENY_OVERRIDES, children)
    }

    pub fn permit_overrides(children: &[&str]) -> &'static str {
        fold(&PERMIT_OVERRIDES, children)
    }

    pub fn first_applicable(children: &[&str]) -> &'static str {
        fold(&FIRST_APPLICABLE, children)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Lit {
    Str(String),
    Int(i64),
    Num(f64),
    Bool(bool),
    /// Compared as text; only canonical UTC timestamps are expected.
    Time(String),
    Point(f64, f64),
}

impl Lit {
    fn parse(j: &Json) -> Lit {
        let value = &j["value"];
        match j["kind"].as_str().expect("literal kind") {
            "string" => Lit::Str(value.as_str().expect("string").to_string()),
            "integer" => Lit::Int(value.as_i64().expect("integer")),
            "double" => Lit::Num(value.as_f64().expect("double")),
            "boolean" => Lit::Bool(value.as_bool().expect("boolean")),
            "dateTime" => Lit::Time(value.as_str().expect("dateTime").to_string()),
            "geoPoint" => Lit::Point(value["lat"].as_f64().unwrap(), value["lon"].as_f64().unwrap()),
            other => panic!("oracle does not model literal kind {other}"),
        }
    }

    fn compare(&self, op: &str, bound: &Lit) -> bool {
        use std::cmp::Ordering;
        let ord: Option<Ordering> = match (self, bound) {
            (Lit::Int(a), Lit::Int(b)) => Some(a.cmp(b)),
            (Lit::Num(a), Lit::Num(b)) => a.partial_cmp(b),
            (Lit::Time(a), Lit::Time(b)) => Some(a.cmp(b)),
            _ => None,
        };
        match op {
            "=" => self == bound,
            "!=" => std::mem::discriminant(self) == std::mem::discriminant(bound) && self != bound,
            "<" => ord == Some(Ordering::Less),
            "<=" => matches!(ord, Some(Ordering::Less | Ordering::Equal)),
            ">" => ord == Some(Ordering::Greater),
            ">=" => matches!(ord, Some(Ordering::Greater | Ordering::Equal)),
            other => panic!("unknown comparator {other}"),
        }
    }
}

#[derive(Clone, Debug)]
enum Expr {
    Named(String),
    And(Vec<Expr>),
    Some(String, Box<Expr>),
    HasIri(String, String),
    HasLit(String, Lit),
    Data(String, String, Lit),
}

/// Knowledge base read directly from ontology documents.
#[derive(Clone, Debug, Default)]
pub struct BruteForceKb {
    sub: Vec<(String, String)>,
    rules: Vec<(Expr, String)>,
    domains: Vec<(String, String)>,
    ranges: Vec<(String, String)>,
    asserted: Vec<(String, String)>,
    objects: Vec<(String, String, String)>,
    data: Vec<(String, String, Lit)>,
    classes: BTreeSet<String>,
    individuals: BTreeSet<String>,
    types: BTreeMap<String, BTreeSet<String>>,
}

fn resolve(name: &str, prefixes: &BTreeMap<String, String>) -> String {
    if let Some(inner) = name.strip_prefix('<').and_then(|n| n.strip_suffix('>')) {
        return inner.to_string();
    }
    match name.split_once(':') {
        Some((p, local)) if prefixes.contains_key(p) => format!("{}{local}", prefixes[p]),
        _ => name.to_string(),
    }
}

fn list(doc: &Json, key: &str) -> Vec<Json> {
    doc.get(key).and_then(Json::as_array).cloned().unwrap_or_default()
}

impl BruteForceKb {
    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a Json>) -> BruteForceKb {
        let mut kb = BruteForceKb::default();
        for doc in docs {
            kb.load(doc);
        }
        kb.classify();
        kb
    }

    fn load(&mut self, doc: &Json) {
        let prefixes: BTreeMap<String, String> = doc
            .get("prefixes")
            .and_then(Json::as_object)
            .map(|m| {
                m.iter()
                    .map(|(k, v)| (k.clone(), v.as_str().unwrap().to_string()))
                    .collect()
            })
            .unwrap_or_default();
        let r = |n: &Json| resolve(n.as_str().expect("name"), &prefixes);
        for c in list(doc, "classes") {
            self.classes.insert(r(&c));
        }
        for pair in list(doc, "subClassOf") {
            let sup = r(&pair[1]);
            self.classes.insert(sup.clone());
            if pair[0].is_string() {
                self.classes.insert(r(&pair[0]));
                self.sub.push((r(&pair[0]), sup));
            } else {
                let e = self.expr(&pair[0], &prefixes);
                self.rules.push((e, sup));
            }
        }
        for eq in list(doc, "equivalent") {
            let e = self.expr(&eq["expr"], &prefixes);
            let name = r(&eq["name"]);
            self.classes.insert(name.clone());
            self.rules.push((e, name));
        }
        for p in list(doc, "objectProperties") {
            let name = r(&p["name"]);
            if let Some(d) = p.get("domain") {
                self.classes.insert(r(d));
                self.domains.push((name.clone(), r(d)));
            }
            if let Some(rg) = p.get("range") {
                self.classes.insert(r(rg));
                self.ranges.push((name.clone(), r(rg)));
            }
        }
        for p in list(doc, "dataProperties") {
            if let Some(d) = p.get("domain") {
                self.classes.insert(r(d));
                self.domains.push((r(&p["name"]), r(d)));
            }
        }
        for ind in list(doc, "individuals") {
            let name = r(&ind["name"]);
            self.individuals.insert(name.clone());
            for t in list(&ind, "types") {
                self.classes.insert(r(&t));
                self.asserted.push((name.clone(), r(&t)));
            }
            for prop in list(&ind, "props") {
                let p = r(&prop["p"]);
                if let Some(o) = prop.get("o") {
                    self.individuals.insert(r(o));
                    self.objects.push((name.clone(), p, r(o)));
                } else {
                    self.data.push((name.clone(), p, Lit::parse(&prop["literal"])));
                }
            }
        }
    }

    fn expr(&mut self, e: &Json, prefixes: &BTreeMap<String, String>) -> Expr {
        let (tag, body) = e.as_object().and_then(|o| o.iter().next()).expect("expression object");
        let r = |n: &Json| resolve(n.as_str().expect("name"), prefixes);
        match tag.as_str() {
            "named" => {
                self.classes.insert(r(body));
                Expr::Named(r(body))
            }
            "and" => Expr::And(
                body.as_array()
                    .unwrap()
                    .iter()
                    .map(|x| self.expr(x, prefixes))
                    .collect(),
            ),
            "some" => Expr::Some(r(&body["p"]), Box::new(self.expr(&body["expr"], prefixes))),
            "hasValue" => match &body["value"] {
                Json::String(s) => Expr::HasIri(r(&body["p"]), resolve(s, prefixes)),
                lit => Expr::HasLit(r(&body["p"]), Lit::parse(lit)),
            },
            "data" => Expr::Data(
                r(&body["p"]),
                body["op"].as_str().unwrap().to_string(),
                Lit::parse(&body["literal"]),
            ),
            other => panic!("unknown expression {other}"),
        }
    }

    fn classify(&mut self) {
        let mut types: BTreeMap<String, BTreeSet<String>> =
            self.individuals.iter().map(|i| (i.clone(), BTreeSet::new())).collect();
        loop {
            let mut facts: Vec<(String, String)> = self.asserted.clone();
            for (ind, ts) in &types {
                for t in ts {
                    for (sub, sup) in &self.sub {
                        if sub == t {
                            facts.push((ind.clone(), sup.clone()));
                        }
                    }
                }
            }
            for (s, p, o) in &self.objects {
                for (q, d) in &self.domains {
                    if q == p {
                        facts.push((s.clone(), d.clone()));
                    }
                }
                for (q, rg) in &self.ranges {
                    if q == p {
                        facts.push((o.clone(), rg.clone()));
                    }
                }
            }
            for (s, p, _) in &self.data {
                for (q, d) in &self.domains {
                    if q == p {
                        facts.push((s.clone(), d.clone()));
                    }
                }
            }
            for (e, c) in &self.rules {
                for ind in &self.individuals {
                    if self.holds(&types, ind, e) {
                        facts.push((ind.clone(), c.clone()));
                    }
                }
            }
            let mut changed = false;
            for (ind, c) in facts {
                changed |= types.entry(ind).or_default().insert(c);
            }
            if !changed {
                break;
            }
        }
        self.types = types;
    }

    fn holds(&self, types: &BTreeMap<String, BTreeSet<String>>, ind: &str, e: &Expr) -> bool {
        match e {
            Expr::Named(c) => types.get(ind).is_some_and(|t| t.contains(c)),
            Expr::And(parts) => parts.iter().all(|p| self.holds(types, ind, p)),
            Expr::Some(p, filler) => self
                .objects
                .iter()
                .any(|(s, q, o)| s == ind && q == p && self.holds(types, o, filler)),
            Expr::HasIri(p, v) => self.objects.iter().any(|(s, q, o)| s == ind && q == p && o == v),
            Expr::HasLit(p, v) => self.data.iter().any(|(s, q, l)| s == ind && q == p && l == v),
            Expr::Data(p, op, bound) => self
                .data
                .iter()
                .any(|(s, q, l)| s == ind && q == p && l.compare(op, bound)),
        }
    }

    pub fn individuals(&self) -> &BTreeSet<String> {
        &self.individuals
    }

    /// Every class named anywhere in the documents.
    pub fn classes(&self) -> &BTreeSet<String> {
        &self.classes
    }

    pub fn types_of(&self, individual: &str) -> BTreeSet<String> {
        self.types.get(individual).cloned().unwrap_or_default()
    }

    pub fn instances_of(&self, class: &str) -> BTreeSet<String> {
        self.types
            .iter()
            .filter(|(_, ts)| ts.contains(class))
            .map(|(i, _)| i.clone())
            .collect()
    }

    /// Closed-world satisfaction of an expression given in document syntax
    /// with absolute names.
    pub fn satisfies(&self, individual: &str, expr: &Json) -> bool {
        let e = self.clone().expr(expr, &BTreeMap::new());
        self.holds(&self.types, individual, &e)
    }
}
