//! JSON encoding of ontology documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Axiom, ClassExpression, Comparator, Iri, KnowledgeBase, Literal, OntologyError, PrefixTable, Value};

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct Document {
    #[serde(default)]
    prefixes: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    classes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sub_class_of: Vec<(SubJson, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    equivalent: Vec<EquivalentJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    object_properties: Vec<PropertyJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    data_properties: Vec<PropertyJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    individuals: Vec<IndividualJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum SubJson {
    Name(String),
    Expr(ExprJson),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivalentJson {
    name: String,
    expr: ExprJson,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PropertyJson {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    range: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndividualJson {
    name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    types: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    props: Vec<PropJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PropJson {
    p: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    o: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    literal: Option<LiteralJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiteralJson {
    kind: String,
    value: serde_json::Value,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ValueJson {
    Iri(String),
    Literal(LiteralJson),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
enum ExprJson {
    #[serde(rename = "named")]
    Named(String),
    #[serde(rename = "and")]
    And(Vec<ExprJson>),
    #[serde(rename = "some")]
    Some { p: String, expr: Box<ExprJson> },
    #[serde(rename = "hasValue")]
    HasValue { p: String, value: ValueJson },
    #[serde(rename = "data")]
    Data {
        p: String,
        op: String,
        literal: LiteralJson,
    },
}

/// Parses an ontology document.
///
/// Properties referenced by assertions but declared elsewhere are allowed
/// here; see [`KnowledgeBase::undeclared_properties`].
pub fn load_document(bytes: &[u8]) -> Result<KnowledgeBase, OntologyError> {
    let doc: Document = serde_json::from_slice(bytes).map_err(|e| OntologyError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let kb = Lowering::new(&doc)?.run(&doc)?;
    let undeclared = kb.undeclared_properties();
    if !undeclared.is_empty() {
        tracing::debug!(?undeclared, "document references properties it does not declare");
    }
    Ok(kb)
}

struct Lowering {
    prefixes: PrefixTable,
    axioms: Vec<Axiom>,
}

impl Lowering {
    fn new(doc: &Document) -> Result<Self, OntologyError> {
        let mut prefixes = PrefixTable::new();
        for (p, ns) in &doc.prefixes {
            prefixes.bind(p, ns)?;
        }
        Ok(Lowering {
            prefixes,
            axioms: Vec::new(),
        })
    }

    fn iri(&self, name: &str) -> Result<Iri, OntologyError> {
        self.prefixes.resolve(name)
    }

    fn run(mut self, doc: &Document) -> Result<KnowledgeBase, OntologyError> {
        for c in &doc.classes {
            let axiom = Axiom::DeclareClass(self.iri(c)?);
            self.axioms.push(axiom);
        }
        for (i, (sub, sup)) in doc.sub_class_of.iter().enumerate() {
            let sub = match sub {
                SubJson::Name(n) => ClassExpression::Named(self.iri(n)?),
                SubJson::Expr(e) => self.expr(e).map_err(|e| e.at(format!("subClassOf[{i}]")))?,
            };
            let axiom = Axiom::SubClassOf {
                sub,
                sup: self.iri(sup)?,
            };
            self.axioms.push(axiom);
        }
        let mut definitions: BTreeMap<Iri, ClassExpression> = BTreeMap::new();
        for (i, eq) in doc.equivalent.iter().enumerate() {
            let name = self.iri(&eq.name)?;
            let definition = self.expr(&eq.expr).map_err(|e| e.at(format!("equivalent[{i}]")))?;
            match definitions.get(&name) {
                Some(existing) if *existing == definition => continue,
                Some(_) => return Err(OntologyError::DuplicateEquivalence(name)),
                None => {}
            }
            definitions.insert(name.clone(), definition.clone());
            self.axioms.push(Axiom::EquivalentClass { name, definition });
        }
        for p in &doc.object_properties {
            let axiom = Axiom::DeclareObjectProperty {
                property: self.iri(&p.name)?,
                domain: p.domain.as_deref().map(|d| self.iri(d)).transpose()?,
                range: p.range.as_deref().map(|r| self.iri(r)).transpose()?,
            };
            self.axioms.push(axiom);
        }
        for p in &doc.data_properties {
            let axiom = Axiom::DeclareDataProperty {
                property: self.iri(&p.name)?,
                domain: p.domain.as_deref().map(|d| self.iri(d)).transpose()?,
                range: p.range.as_deref().map(str::parse).transpose()?,
            };
            self.axioms.push(axiom);
        }
        for (i, ind) in doc.individuals.iter().enumerate() {
            let name = self.iri(&ind.name)?;
            for t in &ind.types {
                let axiom = Axiom::class_assertion(self.iri(t)?, name.clone());
                self.axioms.push(axiom);
            }
            for (j, prop) in ind.props.iter().enumerate() {
                let axiom = self
                    .prop(&name, prop)
                    .map_err(|e| e.at(format!("individuals[{i}].props[{j}]")))?;
                self.axioms.push(axiom);
            }
        }
        Ok(KnowledgeBase::new(self.prefixes, self.axioms))
    }

    fn prop(&self, subject: &Iri, prop: &PropJson) -> Result<Axiom, OntologyError> {
        let property = self.iri(&prop.p)?;
        match (&prop.o, &prop.literal) {
            (Some(o), None) => Ok(Axiom::ObjectPropertyAssertion {
                property,
                subject: subject.clone(),
                object: self.iri(o)?,
            }),
            (None, Some(lit)) => Ok(Axiom::DataPropertyAssertion {
                property,
                subject: subject.clone(),
                value: literal(lit)?,
            }),
            _ => Err(OntologyError::InvalidDocument(
                "property assertion needs exactly one of `o` and `literal`".into(),
            )),
        }
    }

    fn expr(&self, e: &ExprJson) -> Result<ClassExpression, OntologyError> {
        let expr = match e {
            ExprJson::Named(n) => ClassExpression::Named(self.iri(n)?),
            ExprJson::And(parts) => {
                ClassExpression::IntersectionOf(parts.iter().map(|p| self.expr(p)).collect::<Result<_, _>>()?)
            }
            ExprJson::Some { p, expr } => ClassExpression::some(self.iri(p)?, self.expr(expr)?),
            ExprJson::HasValue { p, value } => ClassExpression::HasValue {
                property: self.iri(p)?,
                value: match value {
                    ValueJson::Iri(v) => Value::Iri(self.iri(v)?),
                    ValueJson::Literal(l) => Value::Literal(literal(l)?),
                },
            },
            ExprJson::Data { p, op, literal: l } => ClassExpression::DataRestriction {
                property: self.iri(p)?,
                comparator: Comparator::parse(op)?,
                bound: literal(l)?,
            },
        };
        expr.validate()?;
        Ok(expr)
    }
}

fn literal(l: &LiteralJson) -> Result<Literal, OntologyError> {
    Literal::from_json(l.kind.parse()?, &l.value)
}

/// Renders a knowledge base as a document that loads back to an equal
/// knowledge base.
pub fn serialize_document(kb: &KnowledgeBase) -> String {
    let p = kb.prefixes();
    let name = |iri: &Iri| p.compact(iri);
    let mut doc = Document {
        prefixes: p.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        ..Default::default()
    };
    let mut individuals: BTreeMap<&Iri, IndividualJson> = BTreeMap::new();
    let entry = |iri: &Iri| IndividualJson {
        name: name(iri),
        types: Vec::new(),
        props: Vec::new(),
    };
    for axiom in kb.axioms() {
        match axiom {
            Axiom::DeclareClass(c) => doc.classes.push(name(c)),
            Axiom::SubClassOf { sub, sup } => {
                let sub = match sub {
                    ClassExpression::Named(n) => SubJson::Name(name(n)),
                    complex => SubJson::Expr(expr_json(p, complex)),
                };
                doc.sub_class_of.push((sub, name(sup)));
            }
            Axiom::EquivalentClass { name: n, definition } => doc.equivalent.push(EquivalentJson {
                name: name(n),
                expr: expr_json(p, definition),
            }),
            Axiom::DeclareObjectProperty {
                property,
                domain,
                range,
            } => doc.object_properties.push(PropertyJson {
                name: name(property),
                domain: domain.as_ref().map(name),
                range: range.as_ref().map(name),
            }),
            Axiom::DeclareDataProperty {
                property,
                domain,
                range,
            } => doc.data_properties.push(PropertyJson {
                name: name(property),
                domain: domain.as_ref().map(name),
                range: range.map(|k| k.name().to_string()),
            }),
            Axiom::ClassAssertion { class, individual } => {
                let e = individuals.entry(individual).or_insert_with(|| entry(individual));
                e.types.push(name(class));
            }
            Axiom::ObjectPropertyAssertion {
                property,
                subject,
                object,
            } => {
                let e = individuals.entry(subject).or_insert_with(|| entry(subject));
                e.props.push(PropJson {
                    p: name(property),
                    o: Some(name(object)),
                    literal: None,
                });
            }
            Axiom::DataPropertyAssertion {
                property,
                subject,
                value,
            } => {
                let e = individuals.entry(subject).or_insert_with(|| entry(subject));
                e.props.push(PropJson {
                    p: name(property),
                    o: None,
                    literal: Some(literal_json(value)),
                });
            }
        }
    }
    doc.individuals = individuals.into_values().collect();
    let mut text = serde_json::to_string_pretty(&doc).expect("document serialization cannot fail");
    text.push('\n');
    text
}

fn literal_json(l: &Literal) -> LiteralJson {
    LiteralJson {
        kind: l.kind().name().to_string(),
        value: l.to_json(),
    }
}

fn expr_json(p: &PrefixTable, e: &ClassExpression) -> ExprJson {
    match e {
        ClassExpression::Named(n) => ExprJson::Named(p.compact(n)),
        ClassExpression::IntersectionOf(parts) => ExprJson::And(parts.iter().map(|x| expr_json(p, x)).collect()),
        ClassExpression::SomeValuesFrom { property, filler } => ExprJson::Some {
            p: p.compact(property),
            expr: Box::new(expr_json(p, filler)),
        },
        ClassExpression::HasValue { property, value } => ExprJson::HasValue {
            p: p.compact(property),
            value: match value {
                Value::Iri(i) => ValueJson::Iri(p.compact(i)),
                Value::Literal(l) => ValueJson::Literal(literal_json(l)),
            },
        },
        ClassExpression::DataRestriction {
            property,
            comparator,
            bound,
        } => ExprJson::Data {
            p: p.compact(property),
            op: comparator.symbol().to_string(),
            literal: literal_json(bound),
        },
    }
}

/// Number of axioms a document contributes before de-duplication. Used by
/// tooling that reports per-document statistics.
pub fn count_statements(bytes: &[u8]) -> Result<usize, OntologyError> {
    let doc: Document = serde_json::from_slice(bytes).map_err(|e| OntologyError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(doc.classes.len()
        + doc.sub_class_of.len()
        + doc.equivalent.len()
        + doc.object_properties.len()
        + doc.data_properties.len()
        + doc
            .individuals
            .iter()
            .map(|i| i.types.len() + i.props.len())
            .sum::<usize>())
}
