//! Forward-chaining closure over a [`KnowledgeBase`].
//!
//! Rules, applied to exhaustion:
//!
//! 1. subclass transitivity over named classes;
//! 2. `C(i) ∧ C ⊑ D ⇒ D(i)`;
//! 3. domain and range typing of property assertions;
//! 4. membership of defined classes: an individual satisfying the
//!    definition of `N` (equivalence, or a subclass axiom with a complex
//!    left-hand side) becomes an instance of `N`.
//!
//! Expression satisfaction is closed-world: a missing assertion makes the
//! condition false.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::ontology::{Axiom, ClassExpression, Iri, KnowledgeBase, OntologyError, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReasonerError {
    #[error("classification exceeded {limit} iterations")]
    IterationLimit { limit: usize },
    #[error(transparent)]
    InvalidExpression(#[from] OntologyError),
    #[error("property {0} is not declared")]
    UndeclaredProperty(Iri),
}

/// Declared (domain, range) of an object property.
type SignatureRef<'a> = (&'a Option<Iri>, &'a Option<Iri>);

/// A knowledge base together with its deductive closure.
#[derive(Clone, Debug)]
pub struct InferredKB {
    base: KnowledgeBase,
    ancestors: BTreeMap<Iri, BTreeSet<Iri>>,
    types: BTreeMap<Iri, BTreeSet<Iri>>,
    instances: BTreeMap<Iri, BTreeSet<Iri>>,
    derived: BTreeSet<(Iri, Iri)>,
}

/// Computes the closure of `kb`.
pub fn classify(kb: &KnowledgeBase) -> Result<InferredKB, ReasonerError> {
    let ancestors = subclass_closure(kb);
    let up = |c: &Iri| -> Vec<Iri> {
        ancestors
            .get(c)
            .map(|a| a.iter().cloned().collect())
            .unwrap_or_else(|| vec![c.clone()])
    };

    let mut types: BTreeMap<Iri, BTreeSet<Iri>> =
        kb.individuals().iter().map(|i| (i.clone(), BTreeSet::new())).collect();
    let seed = |individual: &Iri, class: &Iri, types: &mut BTreeMap<Iri, BTreeSet<Iri>>| {
        types.entry(individual.clone()).or_default().extend(up(class));
    };

    for individual in kb.individuals() {
        for class in kb.asserted_types(individual) {
            seed(individual, class, &mut types);
        }
    }

    // Domain and range typing is independent of class membership, so one pass suffices.
    let mut object_sigs: BTreeMap<&Iri, Vec<SignatureRef<'_>>> = BTreeMap::new();
    for (p, d, r) in kb.object_property_signatures() {
        object_sigs.entry(p).or_default().push((d, r));
    }
    let mut data_domains: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
    for (p, d) in kb.data_property_domains() {
        data_domains.entry(p).or_default().push(d);
    }
    for subject in kb.individuals() {
        for (p, o) in kb.object_assertions_of(subject) {
            for (domain, range) in object_sigs.get(p).into_iter().flatten() {
                if let Some(d) = domain {
                    seed(subject, d, &mut types);
                }
                if let Some(r) = range {
                    seed(o, r, &mut types);
                }
            }
        }
        for (p, _) in kb.data_assertions_of(subject) {
            for d in data_domains.get(p).into_iter().flatten() {
                seed(subject, d, &mut types);
            }
        }
    }

    // Defined-class membership to fixpoint. Every productive pass adds at
    // least one of the finitely many (class, individual) facts.
    let limit = (kb.len() * kb.classes().len()).max(1) + 1;
    let mut passes = 0;
    loop {
        passes += 1;
        if passes > limit {
            return Err(ReasonerError::IterationLimit { limit });
        }
        let mut changed = false;
        for (definition, class) in kb.membership_rules() {
            let newly: Vec<Iri> = types
                .iter()
                .filter(|(_, ts)| !ts.contains(class))
                .filter(|(i, _)| holds(kb, &types, i, definition))
                .map(|(i, _)| i.clone())
                .collect();
            for individual in newly {
                seed(&individual, class, &mut types);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut instances: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    let mut derived = BTreeSet::new();
    for (individual, classes) in &types {
        for class in classes {
            instances.entry(class.clone()).or_default().insert(individual.clone());
            let asserted = Axiom::class_assertion(class.clone(), individual.clone());
            if !kb.contains(&asserted) {
                derived.insert((class.clone(), individual.clone()));
            }
        }
    }
    tracing::trace!(passes, derived = derived.len(), "classification finished");

    Ok(InferredKB {
        base: kb.clone(),
        ancestors,
        types,
        instances,
        derived,
    })
}

/// Reflexive-transitive closure of the named subclass edges, by BFS from
/// every class.
fn subclass_closure(kb: &KnowledgeBase) -> BTreeMap<Iri, BTreeSet<Iri>> {
    let mut closure = BTreeMap::new();
    for class in kb.classes() {
        let mut seen = BTreeSet::from([class.clone()]);
        let mut queue = VecDeque::from([class]);
        while let Some(c) = queue.pop_front() {
            for sup in kb.direct_superclasses(c) {
                if seen.insert(sup.clone()) {
                    queue.push_back(sup);
                }
            }
        }
        closure.insert(class.clone(), seen);
    }
    closure
}

fn holds(kb: &KnowledgeBase, types: &BTreeMap<Iri, BTreeSet<Iri>>, individual: &Iri, expr: &ClassExpression) -> bool {
    match expr {
        ClassExpression::Named(c) => types.get(individual).is_some_and(|t| t.contains(c)),
        ClassExpression::IntersectionOf(parts) => parts.iter().all(|p| holds(kb, types, individual, p)),
        ClassExpression::SomeValuesFrom { property, filler } => kb
            .object_assertions_of(individual)
            .any(|(p, o)| p == property && holds(kb, types, o, filler)),
        ClassExpression::HasValue { property, value } => match value {
            Value::Iri(v) => kb
                .object_assertions_of(individual)
                .any(|(p, o)| p == property && o == v),
            Value::Literal(v) => kb.data_assertions_of(individual).any(|(p, l)| p == property && l == v),
        },
        ClassExpression::DataRestriction {
            property,
            comparator,
            bound,
        } => kb
            .data_assertions_of(individual)
            .any(|(p, l)| p == property && comparator.holds(l, bound) == Some(true)),
    }
}

impl InferredKB {
    pub fn base(&self) -> &KnowledgeBase {
        &self.base
    }

    /// Class assertions that follow from the rules but are not stated in the
    /// base, as `(class, individual)` pairs.
    pub fn derived_class_assertions(&self) -> &BTreeSet<(Iri, Iri)> {
        &self.derived
    }

    /// Reflexive-transitive superclasses of every known class.
    pub fn subclass_closure(&self) -> &BTreeMap<Iri, BTreeSet<Iri>> {
        &self.ancestors
    }

    /// Closed-world membership test of `individual` in `expr`.
    pub fn satisfies(&self, individual: &Iri, expr: &ClassExpression) -> Result<bool, ReasonerError> {
        expr.validate()?;
        Ok(holds(&self.base, &self.types, individual, expr))
    }

    /// Every individual that belongs to `class`, including instances of its
    /// subclasses. Unknown classes have no instances.
    pub fn instances_of(&self, class: &Iri) -> BTreeSet<Iri> {
        self.instances.get(class).cloned().unwrap_or_default()
    }

    /// Every named class `individual` belongs to.
    pub fn types_of(&self, individual: &Iri) -> BTreeSet<Iri> {
        self.types.get(individual).cloned().unwrap_or_default()
    }

    pub fn is_instance(&self, individual: &Iri, class: &Iri) -> bool {
        self.types.get(individual).is_some_and(|t| t.contains(class))
    }

    /// Asserted values of `property` for `individual`.
    pub fn property_values(&self, individual: &Iri, property: &Iri) -> Result<Vec<Value>, ReasonerError> {
        if self.base.property_kind(property).is_none() {
            return Err(ReasonerError::UndeclaredProperty(property.clone()));
        }
        let objects = self
            .base
            .object_assertions_of(individual)
            .filter(|(p, _)| *p == property)
            .map(|(_, o)| Value::Iri(o.clone()));
        let data = self
            .base
            .data_assertions_of(individual)
            .filter(|(p, _)| *p == property)
            .map(|(_, l)| Value::Literal(l.clone()));
        Ok(objects.chain(data).collect())
    }
}
