use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{Axiom, ClassExpression, Iri, Literal, LiteralKind, OntologyError, PrefixTable, PropertyAssertion};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertyKind {
    Object,
    Data,
}

/// Declared (domain, range) of a property.
type Signature<R> = (Option<Iri>, Option<R>);

/// Lookup structures derived from the axiom set.
#[derive(Clone, Debug, Default)]
struct Index {
    individuals_by_class: BTreeMap<Iri, BTreeSet<Iri>>,
    classes_by_individual: BTreeMap<Iri, BTreeSet<Iri>>,
    object_assertions: BTreeMap<Iri, Vec<(Iri, Iri)>>,
    data_assertions: BTreeMap<Iri, Vec<(Iri, Literal)>>,
    superclasses: BTreeMap<Iri, BTreeSet<Iri>>,
    object_properties: BTreeMap<Iri, Vec<Signature<Iri>>>,
    data_properties: BTreeMap<Iri, Vec<Signature<LiteralKind>>>,
    membership_rules: Vec<(ClassExpression, Iri)>,
    classes: BTreeSet<Iri>,
    declared_classes: BTreeSet<Iri>,
    individuals: BTreeSet<Iri>,
    used_properties: BTreeSet<Iri>,
}

impl Index {
    fn insert(&mut self, axiom: &Axiom) {
        match axiom {
            Axiom::DeclareClass(c) => {
                self.classes.insert(c.clone());
                self.declared_classes.insert(c.clone());
            }
            Axiom::SubClassOf { sub, sup } => {
                self.classes.insert(sup.clone());
                self.note_expression(sub);
                match sub {
                    ClassExpression::Named(name) => {
                        self.superclasses.entry(name.clone()).or_default().insert(sup.clone());
                    }
                    complex => self.membership_rules.push((complex.clone(), sup.clone())),
                }
            }
            Axiom::EquivalentClass { name, definition } => {
                self.classes.insert(name.clone());
                self.note_expression(definition);
                self.membership_rules.push((definition.clone(), name.clone()));
            }
            Axiom::DeclareObjectProperty {
                property,
                domain,
                range,
            } => {
                self.classes.extend(domain.iter().chain(range.iter()).cloned());
                self.object_properties
                    .entry(property.clone())
                    .or_default()
                    .push((domain.clone(), range.clone()));
            }
            Axiom::DeclareDataProperty {
                property,
                domain,
                range,
            } => {
                self.classes.extend(domain.iter().cloned());
                self.data_properties
                    .entry(property.clone())
                    .or_default()
                    .push((domain.clone(), *range));
            }
            Axiom::ClassAssertion { class, individual } => {
                self.classes.insert(class.clone());
                self.individuals.insert(individual.clone());
                self.individuals_by_class
                    .entry(class.clone())
                    .or_default()
                    .insert(individual.clone());
                self.classes_by_individual
                    .entry(individual.clone())
                    .or_default()
                    .insert(class.clone());
            }
            Axiom::ObjectPropertyAssertion {
                property,
                subject,
                object,
            } => {
                self.individuals.insert(subject.clone());
                self.individuals.insert(object.clone());
                self.used_properties.insert(property.clone());
                self.object_assertions
                    .entry(subject.clone())
                    .or_default()
                    .push((property.clone(), object.clone()));
            }
            Axiom::DataPropertyAssertion {
                property,
                subject,
                value,
            } => {
                self.individuals.insert(subject.clone());
                self.used_properties.insert(property.clone());
                self.data_assertions
                    .entry(subject.clone())
                    .or_default()
                    .push((property.clone(), value.clone()));
            }
        }
    }

    fn note_expression(&mut self, expr: &ClassExpression) {
        self.classes.extend(expr.named_classes().into_iter().cloned());
        self.used_properties.extend(expr.properties().into_iter().cloned());
    }
}

/// An indexed set of axioms plus the prefix table they were written with.
///
/// Values are immutable: every mutating operation returns a new knowledge
/// base and leaves the receiver untouched, so a `KnowledgeBase` can be shared
/// freely between concurrent evaluations.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    prefixes: PrefixTable,
    axioms: Arc<BTreeSet<Axiom>>,
    index: Arc<Index>,
}

impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.prefixes == other.prefixes && self.axioms == other.axioms
    }
}

impl KnowledgeBase {
    pub fn new(prefixes: PrefixTable, axioms: impl IntoIterator<Item = Axiom>) -> Self {
        let axioms: BTreeSet<Axiom> = axioms.into_iter().collect();
        let mut index = Index::default();
        axioms.iter().for_each(|a| index.insert(a));
        KnowledgeBase {
            prefixes,
            axioms: Arc::new(axioms),
            index: Arc::new(index),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn prefixes(&self) -> &PrefixTable {
        &self.prefixes
    }

    pub fn axioms(&self) -> &BTreeSet<Axiom> {
        &self.axioms
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn contains(&self, axiom: &Axiom) -> bool {
        self.axioms.contains(axiom)
    }

    /// Union of both axiom sets. Prefix tables must agree on shared prefixes.
    pub fn merge(&self, overlay: &KnowledgeBase) -> Result<KnowledgeBase, OntologyError> {
        let mut prefixes = self.prefixes.clone();
        prefixes.merge(&overlay.prefixes)?;
        if overlay.is_empty() {
            return Ok(KnowledgeBase {
                prefixes,
                ..self.clone()
            });
        }
        let mut kb = self.with_axioms(overlay.axioms.iter().cloned());
        kb.prefixes = prefixes;
        Ok(kb)
    }

    /// Adds axioms without any precondition checks. Indexes are extended
    /// incrementally.
    pub fn with_axioms(&self, axioms: impl IntoIterator<Item = Axiom>) -> KnowledgeBase {
        let mut set = (*self.axioms).clone();
        let mut index = (*self.index).clone();
        for axiom in axioms {
            if !set.contains(&axiom) {
                index.insert(&axiom);
                set.insert(axiom);
            }
        }
        KnowledgeBase {
            prefixes: self.prefixes.clone(),
            axioms: Arc::new(set),
            index: Arc::new(index),
        }
    }

    /// Asserts `individual` to be an instance of `class` together with the
    /// given property assertions.
    pub fn add_individual(
        &self,
        individual: &Iri,
        class: &Iri,
        assertions: Vec<PropertyAssertion>,
    ) -> Result<KnowledgeBase, OntologyError> {
        let membership = Axiom::class_assertion(class.clone(), individual.clone());
        if self.contains(&membership) {
            return Err(OntologyError::AlreadyAsserted {
                individual: individual.clone(),
                class: class.clone(),
            });
        }
        for assertion in &assertions {
            self.check_assertion(assertion)?;
        }
        let axioms =
            std::iter::once(membership).chain(assertions.into_iter().map(|a| a.into_axiom(individual.clone())));
        Ok(self.with_axioms(axioms.collect::<Vec<_>>()))
    }

    /// Verifies that the assertion uses a declared property of the right kind.
    pub fn check_assertion(&self, assertion: &PropertyAssertion) -> Result<(), OntologyError> {
        let property = assertion.property();
        let expected = match assertion {
            PropertyAssertion::Object { .. } => PropertyKind::Object,
            PropertyAssertion::Data { .. } => PropertyKind::Data,
        };
        match self.property_kind(property) {
            None => Err(OntologyError::UndeclaredProperty(property.clone())),
            Some(kind) if kind != expected => Err(OntologyError::PropertyKindMismatch {
                property: property.clone(),
                declared: kind,
            }),
            Some(_) => Ok(()),
        }
    }

    pub fn property_kind(&self, property: &Iri) -> Option<PropertyKind> {
        if self.index.object_properties.contains_key(property) {
            Some(PropertyKind::Object)
        } else if self.index.data_properties.contains_key(property) {
            Some(PropertyKind::Data)
        } else {
            None
        }
    }

    /// Declared range kinds of a data property.
    pub fn data_property_ranges(&self, property: &Iri) -> impl Iterator<Item = LiteralKind> + '_ {
        self.index
            .data_properties
            .get(property)
            .into_iter()
            .flatten()
            .filter_map(|(_, range)| *range)
    }

    /// Properties used in assertions or expressions but never declared.
    pub fn undeclared_properties(&self) -> BTreeSet<Iri> {
        self.index
            .used_properties
            .iter()
            .filter(|p| self.property_kind(p).is_none())
            .cloned()
            .collect()
    }

    /// Fails when any used property is undeclared.
    pub fn ensure_properties_declared(&self) -> Result<(), OntologyError> {
        match self.undeclared_properties().into_iter().next() {
            Some(p) => Err(OntologyError::UndeclaredProperty(p)),
            None => Ok(()),
        }
    }

    /// Individuals with an asserted `ClassAssertion` for `class`.
    pub fn asserted_instances(&self, class: &Iri) -> impl Iterator<Item = &Iri> {
        self.index.individuals_by_class.get(class).into_iter().flatten()
    }

    pub fn asserted_types(&self, individual: &Iri) -> impl Iterator<Item = &Iri> {
        self.index.classes_by_individual.get(individual).into_iter().flatten()
    }

    /// Direct named superclasses of a named class.
    pub fn direct_superclasses(&self, class: &Iri) -> impl Iterator<Item = &Iri> {
        self.index.superclasses.get(class).into_iter().flatten()
    }

    pub fn subclass_edges(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.index
            .superclasses
            .iter()
            .flat_map(|(sub, sups)| sups.iter().map(move |sup| (sub, sup)))
    }

    pub fn object_assertions_of(&self, subject: &Iri) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.index
            .object_assertions
            .get(subject)
            .into_iter()
            .flatten()
            .map(|(p, o)| (p, o))
    }

    pub fn data_assertions_of(&self, subject: &Iri) -> impl Iterator<Item = (&Iri, &Literal)> {
        self.index
            .data_assertions
            .get(subject)
            .into_iter()
            .flatten()
            .map(|(p, v)| (p, v))
    }

    pub fn object_property_signatures(&self) -> impl Iterator<Item = (&Iri, &Option<Iri>, &Option<Iri>)> {
        self.index
            .object_properties
            .iter()
            .flat_map(|(p, sigs)| sigs.iter().map(move |(d, r)| (p, d, r)))
    }

    pub fn data_property_domains(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.index
            .data_properties
            .iter()
            .flat_map(|(p, sigs)| sigs.iter().filter_map(move |(d, _)| d.as_ref().map(|d| (p, d))))
    }

    /// Rules of the form `expression ⇒ class`, from equivalences and from
    /// subclass axioms with a complex left-hand side.
    pub fn membership_rules(&self) -> &[(ClassExpression, Iri)] {
        &self.index.membership_rules
    }

    /// Every class name mentioned by any axiom.
    pub fn classes(&self) -> &BTreeSet<Iri> {
        &self.index.classes
    }

    /// Classes introduced through the `classes` section of a document.
    pub fn declared_classes(&self) -> &BTreeSet<Iri> {
        &self.index.declared_classes
    }

    pub fn individuals(&self) -> &BTreeSet<Iri> {
        &self.index.individuals
    }

    pub fn has_individual(&self, individual: &Iri) -> bool {
        self.index.individuals.contains(individual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("urn:t:{s}")).unwrap()
    }

    fn base() -> KnowledgeBase {
        KnowledgeBase::new(
            PrefixTable::new(),
            [
                Axiom::DeclareObjectProperty {
                    property: iri("hasSubject"),
                    domain: Some(iri("Request")),
                    range: None,
                },
                Axiom::DeclareDataProperty {
                    property: iri("count"),
                    domain: None,
                    range: Some(LiteralKind::Integer),
                },
            ],
        )
    }

    #[test]
    fn add_individual_grows_by_assertions_plus_one() {
        let kb = base();
        let with_link = kb
            .add_individual(
                &iri("r"),
                &iri("Request"),
                vec![PropertyAssertion::Object {
                    property: iri("hasSubject"),
                    object: iri("s"),
                }],
            )
            .unwrap();
        assert_eq!(with_link.len(), kb.len() + 2);
        let bare = kb.add_individual(&iri("r"), &iri("Request"), vec![]).unwrap();
        assert_eq!(bare.len(), kb.len() + 1);
        // receiver unchanged
        assert_eq!(kb.len(), 2);
    }

    #[test]
    fn add_individual_rejects_undeclared_property_and_duplicates() {
        let kb = base();
        let err = kb
            .add_individual(
                &iri("r"),
                &iri("Request"),
                vec![PropertyAssertion::Object {
                    property: iri("unknown"),
                    object: iri("s"),
                }],
            )
            .unwrap_err();
        assert!(matches!(err, OntologyError::UndeclaredProperty(_)));

        let err = kb
            .add_individual(
                &iri("r"),
                &iri("Request"),
                vec![PropertyAssertion::Object {
                    property: iri("count"),
                    object: iri("s"),
                }],
            )
            .unwrap_err();
        assert!(matches!(err, OntologyError::PropertyKindMismatch { .. }));

        let kb = kb.add_individual(&iri("r"), &iri("Request"), vec![]).unwrap();
        assert!(matches!(
            kb.add_individual(&iri("r"), &iri("Request"), vec![]),
            Err(OntologyError::AlreadyAsserted { .. })
        ));
    }

    #[test]
    fn by_class_index_matches_linear_scan() {
        let mut kb = base();
        for i in 0..25 {
            let class = if i % 3 == 0 { "A" } else { "B" };
            kb = kb.add_individual(&iri(&format!("i{i}")), &iri(class), vec![]).unwrap();
        }
        for class in ["A", "B", "C"] {
            let indexed: BTreeSet<_> = kb.asserted_instances(&iri(class)).cloned().collect();
            let scanned: BTreeSet<_> = kb
                .axioms()
                .iter()
                .filter_map(|a| match a {
                    Axiom::ClassAssertion { class: c, individual } if *c == iri(class) => Some(individual.clone()),
                    _ => None,
                })
                .collect();
            assert_eq!(indexed, scanned);
        }
        assert_eq!(kb.asserted_instances(&iri("A")).count(), 9);
    }

    #[test]
    fn merge_is_idempotent_and_keeps_identity() {
        let kb = base().add_individual(&iri("x"), &iri("A"), vec![]).unwrap();
        assert_eq!(kb.merge(&kb).unwrap(), kb);
        assert_eq!(kb.merge(&KnowledgeBase::empty()).unwrap(), kb);
        assert_eq!(KnowledgeBase::empty().merge(&kb).unwrap(), kb);
    }

    #[test]
    fn undeclared_properties_are_reported() {
        let kb = KnowledgeBase::new(
            PrefixTable::new(),
            [Axiom::ObjectPropertyAssertion {
                property: iri("p"),
                subject: iri("a"),
                object: iri("b"),
            }],
        );
        assert_eq!(
            kb.undeclared_properties().into_iter().collect::<Vec<_>>(),
            vec![iri("p")]
        );
        assert!(kb.ensure_properties_declared().is_err());
    }
}
