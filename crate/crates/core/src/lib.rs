//! Semantic attribute-based access control.
//!
//! Requests are evaluated against policies written in a compact policy
//! language, with attribute values drawn from the request itself or derived
//! by reasoning over an ontology stack that also carries user-authored
//! privacy preferences as class definitions.

pub mod dsl;
pub mod fixtures;
pub mod functions;
pub mod ontology;
pub mod pdp;
pub mod pip;
pub mod policy;
pub mod reasoner;
pub mod request;
pub mod vocab;
