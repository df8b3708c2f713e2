use std::fmt::Write;

use super::format_duration;
use super::lexer::{is_ident_continue, is_ident_start};
use crate::functions::{Comparison, FunctionRegistry, ParamType, AND, NOT, OR};
use crate::ontology::{format_date_time, Iri, PrefixTable};
use crate::policy::{AttributeDesignator, AttributeValue, Expr, Match, Policy, PolicyNode, PolicySet, Rule};

const INDENT: &str = "  ";

/// Canonical text of `ps`: two-space indentation, one clause per line,
/// names compacted with the built-in prefixes.
pub fn serialize_policy(ps: &PolicySet) -> String {
    let w = Writer {
        prefixes: PrefixTable::builtin(),
    };
    let mut out = String::new();
    w.policy_set(&mut out, ps, 0);
    out
}

struct Writer {
    prefixes: PrefixTable,
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_continue)
}

fn line(out: &mut String, depth: usize, text: impl AsRef<str>) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
    out.push_str(text.as_ref());
    out.push('\n');
}

fn id(s: &str) -> String {
    if is_ident(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Binding strength, loosest first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Or,
    And,
    Not,
    Comparison,
    Primary,
}

impl Writer {
    fn policy_set(&self, out: &mut String, ps: &PolicySet, depth: usize) {
        line(out, depth, format!("policyset {} {{", id(&ps.id)));
        self.target(out, &ps.target, depth + 1);
        line(out, depth + 1, format!("apply {}", ps.combining));
        for child in &ps.children {
            match child {
                PolicyNode::Set(s) => self.policy_set(out, s, depth + 1),
                PolicyNode::Policy(p) => self.policy(out, p, depth + 1),
            }
        }
        line(out, depth, "}");
    }

    fn policy(&self, out: &mut String, p: &Policy, depth: usize) {
        line(out, depth, format!("policy {} {{", id(&p.id)));
        self.target(out, &p.target, depth + 1);
        line(out, depth + 1, format!("apply {}", p.combining));
        for rule in &p.rules {
            self.rule(out, rule, depth + 1);
        }
        line(out, depth, "}");
    }

    fn rule(&self, out: &mut String, r: &Rule, depth: usize) {
        line(out, depth, format!("rule {} {{", id(&r.id)));
        line(out, depth + 1, r.effect.to_string());
        self.target(out, &r.target, depth + 1);
        if let Some(c) = &r.condition {
            line(out, depth + 1, format!("condition {}", self.expr(c, Prec::Or)));
        }
        line(out, depth, "}");
    }

    fn target(&self, out: &mut String, target: &[Match], depth: usize) {
        for m in target {
            let op = Comparison::parse_function_id(&m.matcher)
                .map(|(c, _)| c.operator())
                .unwrap_or("==");
            line(
                out,
                depth,
                format!(
                    "target clause {} {op} {}",
                    self.designator(&m.designator),
                    self.value(&m.value)
                ),
            );
        }
    }

    fn iri(&self, iri: &Iri) -> String {
        self.prefixes
            .compact_with(iri, is_ident)
            .unwrap_or_else(|| format!("<{}>", iri.as_str()))
    }

    fn designator(&self, d: &AttributeDesignator) -> String {
        format!(
            "{}.{}:{}{}",
            d.category,
            self.iri(&d.attribute_id),
            d.kind,
            if d.must_be_present { "!" } else { "" }
        )
    }

    fn value(&self, v: &AttributeValue) -> String {
        match v {
            AttributeValue::String(s) => quote(s),
            AttributeValue::Integer(i) => i.to_string(),
            AttributeValue::Double(d) => format!("{d:?}"),
            AttributeValue::Boolean(b) => b.to_string(),
            AttributeValue::DateTime(dt) => format!("dateTime\"{}\"", format_date_time(dt)),
            AttributeValue::GeoPoint(p) => format!("point({:?}, {:?})", p.lat(), p.lon()),
            AttributeValue::Iri(i) => self.iri(i),
            AttributeValue::Duration(ms) => format!("duration\"{}\"", format_duration(*ms)),
        }
    }

    fn expr(&self, e: &Expr, context: Prec) -> String {
        let (text, prec) = self.expr_inner(e);
        if prec < context {
            format!("({text})")
        } else {
            text
        }
    }

    /// Operators print infix; the parser inserts `one-and-only` around
    /// bags in scalar positions, so those calls are elided.
    fn expr_inner(&self, e: &Expr) -> (String, Prec) {
        match e {
            Expr::Designator(d) => (self.designator(d), Prec::Primary),
            Expr::Constant(v) => (self.value(v), Prec::Primary),
            Expr::Apply { function, args } => {
                match (function.as_str(), args.as_slice()) {
                    (OR, [a, b]) => {
                        return (
                            format!("{} or {}", self.scalar(a, Prec::Or), self.scalar(b, Prec::And)),
                            Prec::Or,
                        )
                    }
                    (AND, [a, b]) => {
                        return (
                            format!("{} and {}", self.scalar(a, Prec::And), self.scalar(b, Prec::Not)),
                            Prec::And,
                        )
                    }
                    (NOT, [a]) => return (format!("not {}", self.scalar(a, Prec::Not)), Prec::Not),
                    _ => {}
                }
                if let (Some((cmp, _)), [a, b]) = (Comparison::parse_function_id(function), args.as_slice()) {
                    return (
                        format!(
                            "{} {} {}",
                            self.scalar(a, Prec::Primary),
                            cmp.operator(),
                            self.scalar(b, Prec::Primary)
                        ),
                        Prec::Comparison,
                    );
                }
                let params = FunctionRegistry::standard()
                    .get(function)
                    .map(|f| f.params().to_vec())
                    .unwrap_or_default();
                let args: Vec<String> = args
                    .iter()
                    .enumerate()
                    .map(|(i, a)| match params.get(i) {
                        Some(ParamType::Scalar(_)) => self.scalar(a, Prec::Or),
                        _ => self.expr(a, Prec::Or),
                    })
                    .collect();
                (format!("{function}({})", args.join(", ")), Prec::Primary)
            }
        }
    }

    /// An operand in scalar position.
    fn scalar(&self, e: &Expr, context: Prec) -> String {
        if let Expr::Apply { function, args } = e {
            if let [Expr::Designator(d)] = args.as_slice() {
                if *function == format!("fn:{}-one-and-only", d.kind.name()) {
                    return self.designator(d);
                }
            }
        }
        self.expr(e, context)
    }
}
