//! Namespaces and reserved identifiers shared by the ontology stack, the
//! policy language and the request encoding.

pub const ACO: &str = "http://sxacml.example.org/ns/aco#";
pub const FIT: &str = "http://sxacml.example.org/ns/fitness#";
pub const PPO: &str = "http://sxacml.example.org/ns/privacy#";
pub const P3P: &str = "http://sxacml.example.org/ns/p3p#";
pub const ORG: &str = "http://sxacml.example.org/ns/org#";
pub const SOSA: &str = "http://sxacml.example.org/ns/sosa#";

/// Prefixes every request document and policy document may use without
/// declaring them.
pub const BUILTIN_PREFIXES: [(&str, &str); 6] = [
    ("aco", ACO),
    ("fit", FIT),
    ("ppo", PPO),
    ("p3p", P3P),
    ("org", ORG),
    ("sosa", SOSA),
];

/// Per-category attribute whose values are the classes of the category
/// individual.
pub const CLASS_ID: &str = "http://sxacml.example.org/ns/aco#classId";
/// Attribute whose values are the classes of the request individual itself.
pub const REQUEST_CLASS_ID: &str = "http://sxacml.example.org/ns/aco#requestClassId";
/// Concrete resource identifier (the XACML resource-id attribute).
pub const RESOURCE_ID: &str = "urn:oasis:names:tc:xacml:1.0:resource:resource-id";

pub const REQUEST: &str = "http://sxacml.example.org/ns/aco#Request";
pub const SUBJECT: &str = "http://sxacml.example.org/ns/aco#Subject";
pub const RESOURCE: &str = "http://sxacml.example.org/ns/aco#Resource";
pub const ACTION: &str = "http://sxacml.example.org/ns/aco#Action";
pub const ENVIRONMENT: &str = "http://sxacml.example.org/ns/aco#Environment";

pub const HAS_SUBJECT: &str = "http://sxacml.example.org/ns/aco#hasSubject";
pub const HAS_RESOURCE: &str = "http://sxacml.example.org/ns/aco#hasResource";
pub const HAS_ACTION: &str = "http://sxacml.example.org/ns/aco#hasAction";
pub const HAS_ENVIRONMENT: &str = "http://sxacml.example.org/ns/aco#hasEnvironment";
