//! Semantic attribute lookup: each request becomes a small ontology of fresh
//! individuals on top of the shared knowledge base, and attributes are
//! answered from its closure.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use uuid::Uuid;

use crate::ontology::{Axiom, Iri, KnowledgeBase, OntologyError, PropertyKind, Value};
use crate::policy::{AttributeValue, Category, ResolveError, ValueKind};
use crate::reasoner::{classify, InferredKB, ReasonerError};
use crate::request::RequestContext;
use crate::vocab::{CLASS_ID, REQUEST, REQUEST_CLASS_ID, RESOURCE_ID};

/// The knowledge base extended with one request's facts.
#[derive(Debug)]
pub struct RequestOntology {
    kb: KnowledgeBase,
    request_individual: Iri,
    category_individuals: BTreeMap<Category, Iri>,
    concrete_resource: Option<Iri>,
    skipped: Vec<String>,
    inferred: OnceLock<Result<InferredKB, ReasonerError>>,
    queries: AtomicUsize,
}

fn iri(s: &str) -> Iri {
    Iri::new(s).expect("vocabulary constants are absolute")
}

/// Builds the request ontology over the union of the domain and mapping
/// ontologies.
pub fn build_request_ontology(
    ctx: &RequestContext,
    domain: &KnowledgeBase,
    mapping: &KnowledgeBase,
) -> Result<RequestOntology, OntologyError> {
    Ok(RequestOntology::build(ctx, &domain.merge(mapping)?))
}

impl RequestOntology {
    /// Builds over an already merged knowledge base with fresh names
    /// `urn:req:<uuid>:<category>`.
    pub fn build(ctx: &RequestContext, base: &KnowledgeBase) -> RequestOntology {
        Self::build_named(ctx, base, &Uuid::new_v4().to_string())
    }

    /// Like [`RequestOntology::build`] with a caller-chosen request id.
    pub fn build_named(ctx: &RequestContext, base: &KnowledgeBase, request_id: &str) -> RequestOntology {
        let fresh = |suffix: &str| iri(&format!("urn:req:{request_id}:{suffix}"));
        let request_individual = fresh("request");
        let mut axioms = vec![Axiom::class_assertion(iri(REQUEST), request_individual.clone())];
        let mut category_individuals = BTreeMap::new();
        let mut skipped = Vec::new();

        for category in ctx.categories() {
            let concrete = match category {
                Category::Resource => ctx.resource_id().cloned(),
                _ => None,
            };
            let individual = match concrete {
                Some(resource) => resource,
                None => {
                    let ind = fresh(category.name());
                    axioms.push(Axiom::class_assertion(category.class_iri(), ind.clone()));
                    ind
                }
            };
            axioms.push(Axiom::ObjectPropertyAssertion {
                property: category.link_property(),
                subject: request_individual.clone(),
                object: individual.clone(),
            });
            for attr in ctx.attributes(category) {
                match (attr.id.as_str(), &attr.value) {
                    (RESOURCE_ID, _) if category == Category::Resource => {}
                    (CLASS_ID, AttributeValue::Iri(class)) => {
                        axioms.push(Axiom::class_assertion(class.clone(), individual.clone()));
                    }
                    _ => match assertion(base, &individual, &attr.id, &attr.value) {
                        Ok(axiom) => axioms.push(axiom),
                        Err(reason) => skipped.push(format!("{category}.{}: {reason}", attr.id)),
                    },
                }
            }
            category_individuals.insert(category, individual);
        }
        for note in &skipped {
            tracing::debug!(%note, "request attribute not asserted");
        }
        RequestOntology {
            kb: base.with_axioms(axioms),
            request_individual,
            category_individuals,
            concrete_resource: ctx.resource_id().cloned(),
            skipped,
            inferred: OnceLock::new(),
            queries: AtomicUsize::new(0),
        }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn request_individual(&self) -> &Iri {
        &self.request_individual
    }

    pub fn category_individual(&self, category: Category) -> Option<&Iri> {
        self.category_individuals.get(&category)
    }

    pub fn category_individuals(&self) -> &BTreeMap<Category, Iri> {
        &self.category_individuals
    }

    /// Request attributes that could not be asserted, with the reason.
    pub fn skipped_attributes(&self) -> &[String] {
        &self.skipped
    }

    /// The closure, computed on first use.
    pub fn inferred(&self) -> Result<&InferredKB, ReasonerError> {
        self.inferred
            .get_or_init(|| classify(&self.kb))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Number of [`RequestOntology::find_attribute`] calls so far.
    pub fn query_count(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }

    /// Values of `attribute_id` for the individual standing for `category`.
    /// The class-id attributes yield the inferred classes of the category
    /// individual or of the request individual.
    pub fn find_attribute(
        &self,
        category: Category,
        attribute_id: &Iri,
        kind: ValueKind,
    ) -> Result<Vec<AttributeValue>, ResolveError> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let reserved = matches!(attribute_id.as_str(), CLASS_ID | REQUEST_CLASS_ID | RESOURCE_ID);
        if reserved && kind != ValueKind::Iri {
            return Err(ResolveError(format!("{attribute_id} is iri-valued, not {kind}")));
        }
        let inferred = self.inferred().map_err(|e| ResolveError(e.to_string()))?;
        let classes_of = |ind: &Iri| inferred.types_of(ind).into_iter().map(AttributeValue::Iri).collect();
        if attribute_id.as_str() == REQUEST_CLASS_ID {
            return Ok(classes_of(&self.request_individual));
        }
        let Some(individual) = self.category_individuals.get(&category) else {
            return Ok(Vec::new());
        };
        match attribute_id.as_str() {
            CLASS_ID => return Ok(classes_of(individual)),
            RESOURCE_ID if category == Category::Resource => {
                return Ok(self
                    .concrete_resource
                    .iter()
                    .cloned()
                    .map(AttributeValue::Iri)
                    .collect())
            }
            _ => {}
        }
        if self.kb.property_kind(attribute_id).is_none() {
            return Err(ResolveError(format!("{attribute_id} is not a declared property")));
        }
        let values = inferred
            .property_values(individual, attribute_id)
            .map_err(|e| ResolveError(e.to_string()))?;
        values
            .into_iter()
            .map(|v| {
                let shown = format!("{v:?}");
                AttributeValue::from_ontology(v, kind)
                    .ok_or_else(|| ResolveError(format!("value {shown} of {attribute_id} is not a {kind}")))
            })
            .collect()
    }
}

fn assertion(base: &KnowledgeBase, subject: &Iri, property: &Iri, value: &AttributeValue) -> Result<Axiom, String> {
    match (base.property_kind(property), value.to_ontology()) {
        (None, _) => Err("not a declared property".into()),
        (_, None) => Err(format!("{} values cannot be asserted", value.kind())),
        (Some(PropertyKind::Object), Some(Value::Iri(object))) => Ok(Axiom::ObjectPropertyAssertion {
            property: property.clone(),
            subject: subject.clone(),
            object,
        }),
        (Some(PropertyKind::Data), Some(Value::Literal(value))) => Ok(Axiom::DataPropertyAssertion {
            property: property.clone(),
            subject: subject.clone(),
            value,
        }),
        (Some(kind), Some(_)) => Err(format!("value does not fit a {kind:?} property")),
    }
}
