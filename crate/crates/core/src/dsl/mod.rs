//! Textual policy language: parser with spanned diagnostics and a canonical
//! serializer.
//!
//! ```text
//! prefix ex = <http://example.org/ns#>
//!
//! policy legal {
//!   target clause subject.aco:classId:iri == org:PoliceDepartment
//!   apply denyOverrides
//!   rule nearby {
//!     permit
//!     condition fn:geo-within-distance(resource.ex:where:geoPoint, point(52.2, 21.0), 1000.0)
//!   }
//! }
//! ```
//!
//! See `docs/policy-language.md` for the full grammar.

mod duration;
mod lexer;
mod parser;
mod serialize;

use std::fmt;

pub use duration::{format_duration, parse_duration};
pub use serialize::serialize_policy;

use crate::functions::FunctionRegistry;
use crate::policy::PolicySet;

/// Byte range plus the 1-based line and column of its start.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub(crate) fn new(src: &str, start: usize, end: usize) -> SourceSpan {
        let start = floor_char_boundary(src, start.min(src.len()));
        let end = end.clamp(start, src.len());
        let before = &src[..start];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = src[line_start..start].chars().count() + 1;
        SourceSpan {
            start,
            end,
            line,
            column,
        }
    }
}

fn floor_char_boundary(s: &str, mut i: usize) -> usize {
    while !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseDiagnostic {
    pub(crate) fn error(message: impl Into<String>, span: SourceSpan) -> ParseDiagnostic {
        ParseDiagnostic {
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }

    pub(crate) fn warning(message: impl Into<String>, span: SourceSpan) -> ParseDiagnostic {
        ParseDiagnostic {
            severity: Severity::Warning,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {level}: {}", self.span.line, self.span.column, self.message)
    }
}

/// Result of parsing: a model exactly when no error diagnostic was produced.
#[derive(Clone, Debug)]
pub struct ParseOutcome {
    pub policy_set: Option<PolicySet>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseOutcome {
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    /// The model, or the first error.
    pub fn into_result(self) -> Result<PolicySet, ParseDiagnostic> {
        match self.policy_set {
            Some(ps) => Ok(ps),
            None => Err(self
                .diagnostics
                .into_iter()
                .find(ParseDiagnostic::is_error)
                .expect("a failed parse reports an error")),
        }
    }
}

/// Parses a policy document against the standard function registry.
pub fn parse_policy_document(text: &str) -> ParseOutcome {
    parse_with_registry(text, FunctionRegistry::standard())
}

pub fn parse_with_registry(text: &str, registry: &FunctionRegistry) -> ParseOutcome {
    parser::parse(text, registry)
}

/// Like [`parse_policy_document`] but starting from raw bytes, reporting
/// invalid UTF-8 as a diagnostic.
pub fn parse_policy_bytes(bytes: &[u8]) -> ParseOutcome {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_policy_document(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            // The prefix is valid UTF-8 by construction.
            let text = std::str::from_utf8(valid).unwrap_or_default();
            let mut span = SourceSpan::new(text, text.len(), text.len());
            span.end = (e.valid_up_to() + e.error_len().unwrap_or(0)).min(bytes.len());
            ParseOutcome {
                policy_set: None,
                diagnostics: vec![ParseDiagnostic::error("input is not valid UTF-8", span)],
            }
        }
    }
}

#[cfg(test)]
mod tests;
