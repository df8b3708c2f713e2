//! Decision point: request-first attribute resolution with semantic
//! fallback, and expansion of class-targeted requests into one decision per
//! instance.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::functions::FunctionRegistry;
use crate::ontology::{Iri, KnowledgeBase, OntologyError};
use crate::pip::RequestOntology;
use crate::policy::{
    AttributeDesignator, AttributeResolver, AttributeValue, Decision, DecisionValue, Evaluator, PolicyError, PolicySet,
    ResolveError, TraceEntry,
};
use crate::reasoner::{classify, InferredKB, ReasonerError};
use crate::request::RequestContext;

/// Resource label of a decision not tied to a concrete resource.
pub const AS_REQUESTED: &str = "<as-requested>";

#[derive(Debug, Error)]
pub enum PdpError {
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error("policy check failed: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Policy(Vec<PolicyError>),
    #[error("decision document: {0}")]
    Document(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionEntry {
    /// `None` for [`AS_REQUESTED`].
    pub resource: Option<Iri>,
    pub decision: Decision,
}

impl DecisionEntry {
    pub fn resource_label(&self) -> &str {
        self.resource.as_ref().map_or(AS_REQUESTED, Iri::as_str)
    }
}

/// One decision per evaluated resource, ordered by resource.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionSet {
    entries: Vec<DecisionEntry>,
}

impl DecisionSet {
    pub fn single(resource: Option<Iri>, decision: Decision) -> DecisionSet {
        DecisionSet {
            entries: vec![DecisionEntry { resource, decision }],
        }
    }

    pub fn entries(&self) -> &[DecisionEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn any_indeterminate(&self) -> bool {
        self.entries
            .iter()
            .any(|e| e.decision.value() == DecisionValue::Indeterminate)
    }

    /// Resources with the given decision.
    pub fn resources_with(&self, value: DecisionValue) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.decision.value() == value)
            .map(DecisionEntry::resource_label)
            .collect()
    }

    pub fn to_json(&self) -> Json {
        let decisions: Vec<Json> = self
            .entries
            .iter()
            .map(|e| {
                let mut obj = json!({
                    "resource": e.resource_label(),
                    "decision": e.decision.value().name(),
                });
                if let Some(status) = e.decision.status() {
                    obj["status"] = json!(status);
                }
                obj
            })
            .collect();
        json!({ "decisions": decisions })
    }

    /// Canonical text: pretty-printed JSON with a trailing newline.
    pub fn to_document(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
        text.push('\n');
        text
    }

    pub fn from_document(bytes: &[u8]) -> Result<DecisionSet, PdpError> {
        let bad = |m: &str| PdpError::Document(m.to_string());
        let doc: Json = serde_json::from_slice(bytes).map_err(|e| PdpError::Document(e.to_string()))?;
        let items = doc["decisions"]
            .as_array()
            .ok_or_else(|| bad("missing `decisions` array"))?;
        let entries = items
            .iter()
            .map(|item| {
                let resource = item["resource"].as_str().ok_or_else(|| bad("missing `resource`"))?;
                let value = item["decision"].as_str().ok_or_else(|| bad("missing `decision`"))?;
                let value = DecisionValue::ALL
                    .into_iter()
                    .find(|v| v.name() == value)
                    .ok_or_else(|| bad("unknown decision"))?;
                let resource = match resource {
                    AS_REQUESTED => None,
                    r => Some(Iri::new(r).map_err(|e| PdpError::Document(e.to_string()))?),
                };
                let status = item.get("status").and_then(Json::as_str).map(str::to_string);
                Ok(DecisionEntry {
                    resource,
                    decision: Decision::new(value, status),
                })
            })
            .collect::<Result<Vec<_>, PdpError>>()?;
        if entries.is_empty() {
            return Err(bad("a decision document has at least one decision"));
        }
        Ok(DecisionSet { entries })
    }
}

impl fmt::Display for DecisionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{} {}", e.resource_label(), e.decision.value())?;
        }
        Ok(())
    }
}

/// Rule trace of one per-resource evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub resource: Option<Iri>,
    pub trace: Vec<TraceEntry>,
}

/// Policies plus the merged domain and mapping ontologies.
pub struct PolicyDecisionPoint {
    policies: Arc<PolicySet>,
    base: KnowledgeBase,
    classified: OnceLock<Result<InferredKB, ReasonerError>>,
    registry: &'static FunctionRegistry,
    parallel: bool,
    pip_queries: AtomicUsize,
}

impl fmt::Debug for PolicyDecisionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolicyDecisionPoint")
            .field("policy", &self.policies.id)
            .field("axioms", &self.base.len())
            .field("parallel", &self.parallel)
            .finish()
    }
}

impl PolicyDecisionPoint {
    pub fn new(policies: PolicySet, domain: &KnowledgeBase, mapping: &KnowledgeBase) -> Result<Self, PdpError> {
        Self::with_knowledge_base(policies, domain.merge(mapping)?)
    }

    /// Type-checks `policies` against the standard registry.
    pub fn with_knowledge_base(policies: PolicySet, base: KnowledgeBase) -> Result<Self, PdpError> {
        let registry = FunctionRegistry::standard();
        let errors = policies.validate(registry);
        if !errors.is_empty() {
            return Err(PdpError::Policy(errors));
        }
        Ok(PolicyDecisionPoint {
            policies: Arc::new(policies),
            base,
            classified: OnceLock::new(),
            registry,
            parallel: false,
            pip_queries: AtomicUsize::new(0),
        })
    }

    /// Evaluates the resources of a class-targeted request in parallel.
    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn policies(&self) -> &PolicySet {
        &self.policies
    }

    pub fn knowledge_base(&self) -> &KnowledgeBase {
        &self.base
    }

    /// The closure of the shared knowledge base, used to enumerate
    /// instances.
    pub fn classified(&self) -> Result<&InferredKB, ReasonerError> {
        self.classified
            .get_or_init(|| classify(&self.base))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Total semantic lookups performed so far.
    pub fn pip_queries(&self) -> usize {
        self.pip_queries.load(Ordering::Relaxed)
    }

    pub fn decide(&self, ctx: &RequestContext) -> DecisionSet {
        self.run(ctx, false).0
    }

    pub fn decide_explained(&self, ctx: &RequestContext) -> (DecisionSet, Vec<Explanation>) {
        self.run(ctx, true)
    }

    /// Resolves one attribute for `ctx`: request values first, then the
    /// request ontology.
    pub fn resolve_attribute(
        &self,
        ctx: &RequestContext,
        designator: &AttributeDesignator,
        ro: &RequestOntology,
    ) -> Result<Vec<AttributeValue>, ResolveError> {
        ContextResolver {
            ctx,
            ro,
            counter: &self.pip_queries,
        }
        .resolve(designator)
    }

    fn run(&self, ctx: &RequestContext, explain: bool) -> (DecisionSet, Vec<Explanation>) {
        if let Err(e) = ctx.validate() {
            return (
                DecisionSet::single(None, Decision::indeterminate(e.to_string())),
                Vec::new(),
            );
        }
        let Some(class) = ctx.resource_class() else {
            let (decision, trace) = self.evaluate(ctx, explain);
            let resource = ctx.resource_id().cloned();
            let explanation = Explanation {
                resource: resource.clone(),
                trace,
            };
            return (DecisionSet::single(resource, decision), vec![explanation]);
        };
        let instances: Vec<Iri> = match self.classified() {
            Ok(inferred) => inferred.instances_of(class).into_iter().collect(),
            Err(e) => {
                return (
                    DecisionSet::single(None, Decision::indeterminate(format!("reasoning failed: {e}"))),
                    Vec::new(),
                )
            }
        };
        if instances.is_empty() {
            return (DecisionSet::single(None, Decision::NOT_APPLICABLE), Vec::new());
        }
        let one = |resource: &Iri| {
            let (decision, trace) = self.evaluate(&ctx.for_resource(resource), explain);
            (
                DecisionEntry {
                    resource: Some(resource.clone()),
                    decision,
                },
                Explanation {
                    resource: Some(resource.clone()),
                    trace,
                },
            )
        };
        // Instances come out of an ordered set, so both paths keep the
        // lexicographic order.
        let results: Vec<_> = if self.parallel {
            instances.par_iter().map(one).collect()
        } else {
            instances.iter().map(one).collect()
        };
        let (entries, explanations) = results.into_iter().unzip();
        (DecisionSet { entries }, explanations)
    }

    fn evaluate(&self, ctx: &RequestContext, explain: bool) -> (Decision, Vec<TraceEntry>) {
        let ro = RequestOntology::build(ctx, &self.base);
        let resolver = ContextResolver {
            ctx,
            ro: &ro,
            counter: &self.pip_queries,
        };
        let evaluator = Evaluator::new(self.registry, &resolver);
        let evaluator = if explain { evaluator.traced() } else { evaluator };
        let decision = evaluator.evaluate_tree(&self.policies);
        (decision, evaluator.into_trace())
    }
}

struct ContextResolver<'a> {
    ctx: &'a RequestContext,
    ro: &'a RequestOntology,
    counter: &'a AtomicUsize,
}

impl AttributeResolver for ContextResolver<'_> {
    fn resolve(&self, d: &AttributeDesignator) -> Result<Vec<AttributeValue>, ResolveError> {
        let from_request: Vec<AttributeValue> = self
            .ctx
            .values(d.category, &d.attribute_id)
            .into_iter()
            .filter(|v| v.kind() == d.kind)
            .cloned()
            .collect();
        if !from_request.is_empty() {
            return Ok(from_request);
        }
        self.counter.fetch_add(1, Ordering::Relaxed);
        self.ro.find_attribute(d.category, &d.attribute_id, d.kind)
    }
}

/// One-shot decision over separately loaded domain and mapping ontologies.
pub fn decide(
    ctx: &RequestContext,
    policies: &PolicySet,
    domain: &KnowledgeBase,
    mapping: &KnowledgeBase,
) -> DecisionSet {
    match PolicyDecisionPoint::new(policies.clone(), domain, mapping) {
        Ok(pdp) => pdp.decide(ctx),
        Err(e) => DecisionSet::single(None, Decision::indeterminate(e.to_string())),
    }
}
