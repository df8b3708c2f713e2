use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::OntologyError;
use crate::vocab::BUILTIN_PREFIXES;

/// An absolute identifier for a class, property or individual.
///
/// Always stored in resolved form, so equality is byte equality of the
/// absolute string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    /// Accepts an already absolute identifier (`scheme:rest`).
    pub fn new(value: impl Into<String>) -> Result<Self, OntologyError> {
        let value = value.into();
        if has_scheme(&value) {
            Ok(Iri(value))
        } else {
            Err(OntologyError::InvalidIri(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Iri {
    type Error = OntologyError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> String {
        iri.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

fn has_scheme(value: &str) -> bool {
    match value.split_once(':') {
        Some((scheme, rest)) => {
            !rest.is_empty()
                && scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                && scheme
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        }
        None => false,
    }
}

/// Mapping from prefix to namespace used to expand `prefix:local` names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrefixTable(BTreeMap<String, String>);

impl PrefixTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The prefixes of the bundled vocabularies.
    pub fn builtin() -> Self {
        PrefixTable(
            BUILTIN_PREFIXES
                .iter()
                .map(|(p, ns)| (p.to_string(), ns.to_string()))
                .collect(),
        )
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.0.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(p, ns)| (p.as_str(), ns.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Binds `prefix`. Rebinding to the same namespace is a no-op, rebinding
    /// to a different one is an error.
    pub fn bind(&mut self, prefix: &str, namespace: &str) -> Result<(), OntologyError> {
        match self.0.get(prefix) {
            Some(existing) if existing != namespace => Err(OntologyError::PrefixConflict {
                prefix: prefix.to_string(),
                existing: existing.clone(),
                incoming: namespace.to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.0.insert(prefix.to_string(), namespace.to_string());
                Ok(())
            }
        }
    }

    pub fn merge(&mut self, other: &PrefixTable) -> Result<(), OntologyError> {
        for (p, ns) in other.iter() {
            self.bind(p, ns)?;
        }
        Ok(())
    }

    /// Resolves `<absolute>`, `prefix:local` with a bound prefix, or an
    /// absolute identifier.
    pub fn resolve(&self, name: &str) -> Result<Iri, OntologyError> {
        if let Some(inner) = name.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
            return Iri::new(inner);
        }
        if let Some((prefix, local)) = name.split_once(':') {
            if let Some(ns) = self.0.get(prefix) {
                return Ok(Iri(format!("{ns}{local}")));
            }
        }
        Iri::new(name).map_err(|_| OntologyError::UnresolvedName(name.to_string()))
    }

    /// Shortest `prefix:local` rendering of `iri` whose local part satisfies
    /// `valid_local`, or `None` when no namespace matches.
    pub fn compact_with(&self, iri: &Iri, valid_local: impl Fn(&str) -> bool) -> Option<String> {
        self.0
            .iter()
            .filter_map(|(p, ns)| {
                iri.as_str()
                    .strip_prefix(ns.as_str())
                    .filter(|local| valid_local(local))
                    .map(|local| (ns.len(), format!("{p}:{local}")))
            })
            .max_by_key(|(len, _)| *len)
            .map(|(_, s)| s)
    }

    pub fn compact(&self, iri: &Iri) -> String {
        self.compact_with(iri, |local| !local.is_empty() && !local.contains(['/', '#', ':']))
            .unwrap_or_else(|| iri.as_str().to_string())
    }
}
