//! Ontology fragment: identifiers, literals, class expressions, axioms and
//! the indexed [`KnowledgeBase`].

mod axiom;
mod document;
mod expr;
mod iri;
mod kb;
mod literal;

pub use axiom::{Axiom, PropertyAssertion};
pub use document::{count_statements, load_document, serialize_document};
pub use expr::{ClassExpression, Comparator, Value};
pub use iri::{Iri, PrefixTable};
pub use kb::{KnowledgeBase, PropertyKind};
pub use literal::{format_date_time, GeoPoint, Literal, LiteralKind};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OntologyError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("`{0}` is not an absolute identifier")]
    InvalidIri(String),
    #[error("cannot resolve `{0}`: unknown prefix and not an absolute identifier")]
    UnresolvedName(String),
    #[error("prefix `{prefix}` bound to both `{existing}` and `{incoming}`")]
    PrefixConflict {
        prefix: String,
        existing: String,
        incoming: String,
    },
    #[error("invalid literal: {0}")]
    InvalidLiteral(String),
    #[error("invalid class expression: {0}")]
    InvalidExpression(String),
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("class {0} has more than one equivalence definition")]
    DuplicateEquivalence(Iri),
    #[error("property {0} is not declared")]
    UndeclaredProperty(Iri),
    #[error("property {property} is declared as a {declared:?} property")]
    PropertyKindMismatch { property: Iri, declared: PropertyKind },
    #[error("{individual} is already asserted to be a {class}")]
    AlreadyAsserted { individual: Iri, class: Iri },
    #[error("{location}: {source}")]
    At {
        location: String,
        #[source]
        source: Box<OntologyError>,
    },
}

impl OntologyError {
    pub(crate) fn at(self, location: String) -> OntologyError {
        OntologyError::At {
            location,
            source: Box::new(self),
        }
    }
}
