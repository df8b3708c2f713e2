//! The active configuration: policies plus knowledge base behind an
//! atomically swappable pointer.

use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use serde::Serialize;
use sxacml::dsl::parse_policy_document;
use sxacml::fixtures::{load_ontology_files, load_policy_files, FixtureError};
use sxacml::ontology::{load_document, KnowledgeBase};
use sxacml::pdp::{DecisionSet, Explanation, PdpError, PolicyDecisionPoint};
use sxacml::policy::PolicySet;
use sxacml::request::RequestContext;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Load(#[from] FixtureError),
    #[error(transparent)]
    Pdp(#[from] PdpError),
    #[error("{} problem(s) in the submitted documents", .0.len())]
    Rejected(Vec<Problem>),
}

/// One reason a submitted document was rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Problem {
    pub document: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    pub message: String,
}

/// Files making up the startup configuration. Ontology and mapping
/// documents are merged; policy documents are combined in order, earlier
/// documents taking priority.
#[derive(Clone, Debug, Default)]
pub struct EngineConfig {
    pub ontologies: Vec<PathBuf>,
    pub mapping: Vec<PathBuf>,
    pub policies: Vec<PathBuf>,
}

impl EngineConfig {
    pub fn load(&self) -> Result<PolicyDecisionPoint, EngineError> {
        let ontology_paths: Vec<&PathBuf> = self.ontologies.iter().chain(&self.mapping).collect();
        let kb = load_ontology_files(&ontology_paths)?;
        let policies = load_policy_files(&self.policies)?;
        Ok(PolicyDecisionPoint::with_knowledge_base(policies, kb)?.parallel(true))
    }
}

/// Shared engine state. Readers take a snapshot of the current decision
/// point; reloads are serialized and publish a fully built replacement.
pub struct Engine {
    current: RwLock<Arc<PolicyDecisionPoint>>,
    reload: Mutex<()>,
}

impl Engine {
    pub fn new(pdp: PolicyDecisionPoint) -> Engine {
        Engine {
            current: RwLock::new(Arc::new(pdp)),
            reload: Mutex::new(()),
        }
    }

    pub fn snapshot(&self) -> Arc<PolicyDecisionPoint> {
        Arc::clone(&self.current.read().expect("engine lock poisoned"))
    }

    pub fn decide(&self, ctx: &RequestContext) -> DecisionSet {
        self.snapshot().decide(ctx)
    }

    pub fn decide_explained(&self, ctx: &RequestContext) -> (DecisionSet, Vec<Explanation>) {
        self.snapshot().decide_explained(ctx)
    }

    /// Replaces the policy set with the given documents, in order.
    pub fn replace_policies(&self, documents: &[String]) -> Result<(), EngineError> {
        let mut sets = Vec::new();
        let mut problems = Vec::new();
        for (i, text) in documents.iter().enumerate() {
            let outcome = parse_policy_document(text);
            problems.extend(outcome.errors().map(|d| Problem {
                document: i,
                line: Some(d.span.line),
                column: Some(d.span.column),
                message: d.message.clone(),
            }));
            sets.extend(outcome.policy_set);
        }
        if !problems.is_empty() {
            return Err(EngineError::Rejected(problems));
        }
        let policies = PolicySet::ordered(sets);
        self.swap(|current| PolicyDecisionPoint::with_knowledge_base(policies, current.knowledge_base().clone()))
    }

    /// Replaces the whole knowledge base with the merge of the given
    /// ontology documents.
    pub fn replace_ontologies(&self, documents: &[serde_json::Value]) -> Result<(), EngineError> {
        let mut kb = KnowledgeBase::empty();
        let mut problems = Vec::new();
        for (i, doc) in documents.iter().enumerate() {
            let merged = load_document(doc.to_string().as_bytes()).and_then(|d| kb.merge(&d));
            match merged {
                Ok(next) => kb = next,
                Err(e) => problems.push(Problem {
                    document: i,
                    line: None,
                    column: None,
                    message: e.to_string(),
                }),
            }
        }
        if !problems.is_empty() {
            return Err(EngineError::Rejected(problems));
        }
        self.swap(|current| PolicyDecisionPoint::with_knowledge_base(current.policies().clone(), kb))
    }

    fn swap(
        &self,
        build: impl FnOnce(&PolicyDecisionPoint) -> Result<PolicyDecisionPoint, PdpError>,
    ) -> Result<(), EngineError> {
        let _serialized = self.reload.lock().expect("reload lock poisoned");
        let current = self.snapshot();
        let next = build(&current).map_err(|e| match e {
            PdpError::Policy(errors) => EngineError::Rejected(
                errors
                    .into_iter()
                    .map(|e| Problem {
                        document: 0,
                        line: None,
                        column: None,
                        message: e.to_string(),
                    })
                    .collect(),
            ),
            other => EngineError::Pdp(other),
        })?;
        // Classify before publishing so the first reader does not pay for it.
        if let Err(e) = next.classified() {
            return Err(EngineError::Rejected(vec![Problem {
                document: 0,
                line: None,
                column: None,
                message: e.to_string(),
            }]));
        }
        *self.current.write().expect("engine lock poisoned") = Arc::new(next.parallel(true));
        tracing::info!("configuration replaced");
        Ok(())
    }
}
