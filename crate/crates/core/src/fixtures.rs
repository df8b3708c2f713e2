//! Loading of versioned fixture assets described by a manifest file.
//!
//! ```json
//! {"entries": [{"name": "aco", "path": "ontologies/aco.json", "kind": "ontology"}]}
//! ```
//!
//! Paths are relative to the manifest's directory. Ontologies are merged in
//! manifest order; policy documents are combined with
//! [`PolicySet::ordered`], so earlier documents take priority.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::dsl::{parse_policy_document, ParseDiagnostic};
use crate::ontology::{load_document, KnowledgeBase, OntologyError};
use crate::pdp::{DecisionSet, PdpError};
use crate::policy::PolicySet;
use crate::request::{RequestContext, RequestError};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: invalid manifest: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Ontology {
        path: PathBuf,
        #[source]
        source: OntologyError,
    },
    #[error("{}:{diagnostic}", path.display())]
    Policy { path: PathBuf, diagnostic: ParseDiagnostic },
    #[error("{}: {source}", path.display())]
    Request {
        path: PathBuf,
        #[source]
        source: RequestError,
    },
    #[error("{}: {source}", path.display())]
    Expected {
        path: PathBuf,
        #[source]
        source: PdpError,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    Ontology,
    Policy,
    Request,
    ExpectedDecisions,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureEntry {
    pub name: String,
    pub path: PathBuf,
    pub kind: FixtureKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureManifest {
    base: PathBuf,
    entries: Vec<FixtureEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    entries: Vec<FixtureEntry>,
}

impl FixtureManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<FixtureManifest, FixtureError> {
        let path = path.as_ref();
        let bytes = read(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        FixtureManifest::from_json(&bytes, base).map_err(|message| FixtureError::Manifest {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Parses a manifest whose relative paths resolve against `base`.
    pub fn from_json(bytes: &[u8], base: impl Into<PathBuf>) -> Result<FixtureManifest, String> {
        let doc: ManifestDoc = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        Ok(FixtureManifest {
            base: base.into(),
            entries: doc.entries,
        })
    }

    pub fn entries(&self) -> &[FixtureEntry] {
        &self.entries
    }

    pub fn path_of(&self, entry: &FixtureEntry) -> PathBuf {
        self.base.join(&entry.path)
    }

    pub fn paths(&self, kind: FixtureKind) -> Vec<PathBuf> {
        self.entries
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| self.path_of(e))
            .collect()
    }
}

/// A request paired with its expected decisions, if the manifest has them.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub request_path: PathBuf,
    pub request: RequestContext,
    pub expected_path: Option<PathBuf>,
    pub expected: Option<DecisionSet>,
}

#[derive(Clone, Debug)]
pub struct FixtureStack {
    pub knowledge_base: KnowledgeBase,
    pub policies: PolicySet,
    pub scenarios: Vec<Scenario>,
}

impl FixtureStack {
    pub fn scenario(&self, name: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.name == name)
    }
}

pub fn load_fixture_stack(manifest: impl AsRef<Path>) -> Result<FixtureStack, FixtureError> {
    load_manifest(&FixtureManifest::load(manifest)?)
}

pub fn load_manifest(manifest: &FixtureManifest) -> Result<FixtureStack, FixtureError> {
    let knowledge_base = load_ontology_files(&manifest.paths(FixtureKind::Ontology))?;
    let policies = load_policy_files(&manifest.paths(FixtureKind::Policy))?;
    let mut scenarios = Vec::new();
    for entry in manifest.entries().iter().filter(|e| e.kind == FixtureKind::Request) {
        let request_path = manifest.path_of(entry);
        let request = load_request_file(&request_path)?;
        let expected_path = manifest
            .entries()
            .iter()
            .find(|e| e.kind == FixtureKind::ExpectedDecisions && e.name == entry.name)
            .map(|e| manifest.path_of(e));
        let expected = match &expected_path {
            Some(path) => Some(
                DecisionSet::from_document(&read(path)?).map_err(|source| FixtureError::Expected {
                    path: path.clone(),
                    source,
                })?,
            ),
            None => None,
        };
        scenarios.push(Scenario {
            name: entry.name.clone(),
            request_path,
            request,
            expected_path,
            expected,
        });
    }
    Ok(FixtureStack {
        knowledge_base,
        policies,
        scenarios,
    })
}

/// Loads and merges ontology documents; an empty list gives an empty KB.
pub fn load_ontology_files<P: AsRef<Path>>(paths: &[P]) -> Result<KnowledgeBase, FixtureError> {
    let mut kb = KnowledgeBase::empty();
    for path in paths {
        let path = path.as_ref();
        let wrap = |source| FixtureError::Ontology {
            path: path.to_path_buf(),
            source,
        };
        let doc = load_document(&read(path)?).map_err(wrap)?;
        kb = kb.merge(&doc).map_err(wrap)?;
    }
    Ok(kb)
}

/// Parses policy documents and combines them in order.
pub fn load_policy_files<P: AsRef<Path>>(paths: &[P]) -> Result<PolicySet, FixtureError> {
    let mut sets = Vec::with_capacity(paths.len());
    for path in paths {
        let path = path.as_ref();
        let bytes = read(path)?;
        let text = String::from_utf8_lossy(&bytes);
        let set = parse_policy_document(&text)
            .into_result()
            .map_err(|diagnostic| FixtureError::Policy {
                path: path.to_path_buf(),
                diagnostic,
            })?;
        sets.push(set);
    }
    Ok(PolicySet::ordered(sets))
}

pub fn load_request_file(path: impl AsRef<Path>) -> Result<RequestContext, FixtureError> {
    let path = path.as_ref();
    RequestContext::from_json(&read(path)?).map_err(|source| FixtureError::Request {
        path: path.to_path_buf(),
        source,
    })
}

fn read(path: &Path) -> Result<Vec<u8>, FixtureError> {
    fs::read(path).map_err(|source| FixtureError::Io {
        path: path.to_path_buf(),
        source,
    })
}
