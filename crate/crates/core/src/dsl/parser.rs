use std::collections::BTreeSet;

use super::lexer::{tokenize, Tok, Token};
use super::{parse_duration, ParseDiagnostic, ParseOutcome, SourceSpan};
use crate::functions::{Comparison, FunctionRegistry, ParamType, AND, NOT, OR};
use crate::ontology::{GeoPoint, Iri, Literal, PrefixTable};
use crate::policy::{
    check_match, AttributeDesignator, AttributeValue, Category, CombiningAlgorithm, Effect, Expr, Match, Policy,
    PolicyNode, PolicySet, Rule, ValueKind, ROOT_ID,
};

/// Bound on nesting of policy sets and of expressions.
const MAX_DEPTH: usize = 128;

pub(crate) fn parse(text: &str, registry: &FunctionRegistry) -> ParseOutcome {
    let tokens = match tokenize(text) {
        Ok(tokens) => tokens,
        Err(d) => {
            return ParseOutcome {
                policy_set: None,
                diagnostics: vec![d],
            }
        }
    };
    let mut p = Parser {
        src: text,
        tokens,
        pos: 0,
        prefixes: PrefixTable::builtin(),
        registry,
        diagnostics: Vec::new(),
    };
    let result = p.document();
    if let Ok(ps) = &result {
        if !p.has_errors() {
            for e in ps.validate(registry) {
                p.diagnostics
                    .push(ParseDiagnostic::error(e.to_string(), SourceSpan::new(text, 0, 0)));
            }
        }
    }
    let policy_set = match result {
        Ok(ps) if !p.has_errors() => Some(ps),
        _ => None,
    };
    ParseOutcome {
        policy_set,
        diagnostics: p.diagnostics,
    }
}

/// A syntax error has been recorded; parsing stops.
struct Abort;

type PResult<T> = Result<T, Abort>;

/// A typed expression under construction.
struct Typed {
    expr: Expr,
    /// `None` after a reported type error.
    ty: Option<ParamType>,
    depth: usize,
    start: usize,
    end: usize,
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    prefixes: PrefixTable,
    registry: &'a FunctionRegistry,
    diagnostics: Vec<ParseDiagnostic>,
}

impl<'a> Parser<'a> {
    fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(ParseDiagnostic::is_error)
    }

    fn token(&self, offset: usize) -> &Token {
        let last = self.tokens.len() - 1;
        &self.tokens[(self.pos + offset).min(last)]
    }

    fn peek(&self) -> &Tok {
        &self.token(0).tok
    }

    fn peek2(&self) -> &Tok {
        &self.token(1).tok
    }

    fn start(&self) -> usize {
        self.token(0).start
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].end
        }
    }

    fn advance(&mut self) -> Token {
        let t = self.token(0).clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn span(&self, start: usize, end: usize) -> SourceSpan {
        SourceSpan::new(self.src, start, end)
    }

    fn error(&mut self, message: impl Into<String>, start: usize, end: usize) {
        let span = self.span(start, end);
        self.diagnostics.push(ParseDiagnostic::error(message, span));
    }

    fn fail(&mut self, message: impl Into<String>, start: usize, end: usize) -> Abort {
        self.error(message, start, end);
        Abort
    }

    fn unexpected(&mut self, expected: &str) -> Abort {
        let t = self.token(0).clone();
        let message = match t.tok {
            Tok::Assign => format!("expected {expected}, found `=` (equality is written `==`)"),
            ref other => format!("expected {expected}, found {}", other.describe()),
        };
        self.fail(message, t.start, t.end)
    }

    fn at_keyword(&self, keyword: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == keyword)
    }

    fn expect_keyword(&mut self, keyword: &str) -> PResult<Token> {
        if self.at_keyword(keyword) {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&format!("`{keyword}`")))
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if *self.peek() == tok {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    // ---- structure ----

    fn document(&mut self) -> PResult<PolicySet> {
        let mut items = Vec::new();
        let mut seen = BTreeSet::new();
        loop {
            let start = self.start();
            let node = match self.peek() {
                Tok::Eof => break,
                Tok::Ident(k) if k == "prefix" => {
                    self.prefix_declaration()?;
                    continue;
                }
                Tok::Ident(k) if k == "policyset" => PolicyNode::Set(self.policy_set(1)?),
                Tok::Ident(k) if k == "policy" => PolicyNode::Policy(self.policy()?),
                _ => return Err(self.unexpected("`prefix`, `policyset` or `policy`")),
            };
            self.check_unique(&mut seen, node.id(), start);
            items.push(node);
        }
        if let [PolicyNode::Set(_)] = items.as_slice() {
            if let Some(PolicyNode::Set(set)) = items.pop() {
                return Ok(set);
            }
        }
        let mut root = PolicySet::empty(ROOT_ID);
        root.children = items;
        Ok(root)
    }

    fn check_unique(&mut self, seen: &mut BTreeSet<String>, id: &str, start: usize) {
        if !seen.insert(id.to_string()) {
            let end = self.prev_end();
            self.error(format!("duplicate id `{id}`"), start, end);
        }
    }

    fn prefix_declaration(&mut self) -> PResult<()> {
        self.expect_keyword("prefix")?;
        let name_tok = self.advance();
        let Tok::Ident(name) = name_tok.tok else {
            self.pos -= 1;
            return Err(self.unexpected("a prefix name"));
        };
        self.expect(Tok::Assign)?;
        let iri_tok = self.advance();
        let Tok::IriRef(namespace) = iri_tok.tok else {
            self.pos -= 1;
            return Err(self.unexpected("a namespace in angle brackets"));
        };
        if name == "fn" {
            self.error("prefix `fn` is reserved for functions", name_tok.start, name_tok.end);
        } else if let Err(e) = self.prefixes.bind(&name, &namespace) {
            self.error(e.to_string(), name_tok.start, iri_tok.end);
        }
        Ok(())
    }

    fn id(&mut self) -> PResult<String> {
        let t = self.advance();
        let id = match t.tok {
            Tok::Ident(s) | Tok::Str(s) => s,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("an identifier"));
            }
        };
        if id.is_empty() {
            self.error("identifiers must not be empty", t.start, t.end);
        }
        Ok(id)
    }

    fn policy_set(&mut self, depth: usize) -> PResult<PolicySet> {
        let start = self.start();
        self.expect_keyword("policyset")?;
        if depth > MAX_DEPTH {
            let end = self.prev_end();
            return Err(self.fail("policy sets are nested too deeply", start, end));
        }
        let mut set = PolicySet::empty(self.id()?);
        self.expect(Tok::LBrace)?;
        let mut combining = None;
        let mut seen = BTreeSet::new();
        loop {
            let child_start = self.start();
            match self.peek() {
                Tok::RBrace => break,
                Tok::Ident(k) if k == "target" => set.target.extend(self.target()?),
                Tok::Ident(k) if k == "apply" => self.apply(&mut combining)?,
                Tok::Ident(k) if k == "policyset" => {
                    let child = PolicyNode::Set(self.policy_set(depth + 1)?);
                    self.check_unique(&mut seen, child.id(), child_start);
                    set.children.push(child);
                }
                Tok::Ident(k) if k == "policy" => {
                    let child = PolicyNode::Policy(self.policy()?);
                    self.check_unique(&mut seen, child.id(), child_start);
                    set.children.push(child);
                }
                _ => return Err(self.unexpected("`target`, `apply`, `policyset`, `policy` or `}`")),
            }
        }
        self.advance();
        set.combining = combining.unwrap_or(CombiningAlgorithm::FirstApplicable);
        Ok(set)
    }

    fn policy(&mut self) -> PResult<Policy> {
        self.expect_keyword("policy")?;
        let id = self.id()?;
        self.expect(Tok::LBrace)?;
        let mut target = Vec::new();
        let mut combining = None;
        let mut rules: Vec<(Rule, usize, usize)> = Vec::new();
        let mut seen = BTreeSet::new();
        loop {
            match self.peek() {
                Tok::RBrace => break,
                Tok::Ident(k) if k == "target" => target.extend(self.target()?),
                Tok::Ident(k) if k == "apply" => self.apply(&mut combining)?,
                Tok::Ident(k) if k == "rule" => {
                    let start = self.start();
                    let rule = self.rule()?;
                    self.check_unique(&mut seen, &rule.id, start);
                    rules.push((rule, start, self.prev_end()));
                }
                _ => return Err(self.unexpected("`target`, `apply`, `rule` or `}`")),
            }
        }
        self.advance();
        let combining = combining.unwrap_or(CombiningAlgorithm::FirstApplicable);
        if combining == CombiningAlgorithm::FirstApplicable {
            if let Some(i) = rules
                .iter()
                .position(|(r, _, _)| r.target.is_empty() && r.condition.is_none())
            {
                if let Some((r, start, end)) = rules.get(i + 1) {
                    let span = self.span(*start, *end);
                    self.diagnostics.push(ParseDiagnostic::warning(
                        format!("rule `{}` is unreachable under firstApplicable", r.id),
                        span,
                    ));
                }
            }
        }
        Ok(Policy {
            id,
            target,
            combining,
            rules: rules.into_iter().map(|(r, _, _)| r).collect(),
        })
    }

    fn apply(&mut self, slot: &mut Option<CombiningAlgorithm>) -> PResult<()> {
        let start = self.start();
        self.expect_keyword("apply")?;
        let t = self.advance();
        let Tok::Ident(name) = t.tok else {
            self.pos -= 1;
            return Err(self.unexpected("a combining algorithm"));
        };
        match name.parse::<CombiningAlgorithm>() {
            Err(message) => self.error(
                format!("{message}; expected one of denyOverrides, permitOverrides, firstApplicable"),
                t.start,
                t.end,
            ),
            Ok(_) if slot.is_some() => self.error("combining algorithm given twice", start, t.end),
            Ok(alg) => *slot = Some(alg),
        }
        Ok(())
    }

    fn rule(&mut self) -> PResult<Rule> {
        let start = self.start();
        self.expect_keyword("rule")?;
        let id = self.id()?;
        let header_end = self.prev_end();
        self.expect(Tok::LBrace)?;
        let mut effect = None;
        let mut target = Vec::new();
        let mut condition = None;
        loop {
            let item_start = self.start();
            match self.peek() {
                Tok::RBrace => break,
                Tok::Ident(k) if k == "permit" || k == "deny" => {
                    let e = if k == "permit" { Effect::Permit } else { Effect::Deny };
                    let t = self.advance();
                    if effect.replace(e).is_some() {
                        self.error("rule effect given twice", t.start, t.end);
                    }
                }
                Tok::Ident(k) if k == "target" => target.extend(self.target()?),
                Tok::Ident(k) if k == "condition" => {
                    self.advance();
                    let c = self.condition()?;
                    if condition.replace(c).is_some() {
                        let end = self.prev_end();
                        self.error("rule has more than one condition", item_start, end);
                    }
                }
                _ => return Err(self.unexpected("`permit`, `deny`, `target`, `condition` or `}`")),
            }
        }
        self.advance();
        let effect = match effect {
            Some(e) => e,
            None => {
                self.error(
                    format!("rule `{id}` has no effect (`permit` or `deny`)"),
                    start,
                    header_end,
                );
                Effect::Deny
            }
        };
        Ok(Rule {
            id,
            effect,
            target,
            condition,
        })
    }

    /// `target clause m (and m)*`
    fn target(&mut self) -> PResult<Vec<Match>> {
        self.expect_keyword("target")?;
        self.expect_keyword("clause")?;
        let mut matches = vec![self.match_clause()?];
        while self.at_keyword("and") {
            self.advance();
            matches.push(self.match_clause()?);
        }
        Ok(matches)
    }

    fn match_clause(&mut self) -> PResult<Match> {
        let start = self.start();
        if !matches!(self.peek2(), Tok::Dot) {
            return Err(self.unexpected("an attribute reference (`category.attribute:kind`)"));
        }
        let designator = self.designator()?;
        let Some(cmp) = self.comparison_operator() else {
            return Err(self.unexpected("a comparison operator"));
        };
        self.advance();
        let Some((mut value, _, _)) = self.literal()? else {
            return Err(self.unexpected("a literal value"));
        };
        if designator.kind == ValueKind::Double {
            if let AttributeValue::Integer(i) = value {
                value = AttributeValue::Double(i as f64);
            }
        }
        let end = self.prev_end();
        let m = Match {
            matcher: cmp.function_id(designator.kind),
            designator,
            value,
        };
        if self.registry.get(&m.matcher).is_none() {
            self.error(
                format!(
                    "operator `{}` is not defined for {} values",
                    cmp.operator(),
                    m.designator.kind
                ),
                start,
                end,
            );
        } else if let Err(message) = check_match(&m, self.registry) {
            self.error(message, start, end);
        }
        Ok(m)
    }

    fn condition(&mut self) -> PResult<Expr> {
        let t = self.expr(0)?;
        let t = self.scalarize(t);
        if let Some(ty) = t.ty {
            if ty != ParamType::BOOLEAN {
                self.error(format!("condition has type {ty}, expected boolean"), t.start, t.end);
            }
        }
        Ok(t.expr)
    }

    // ---- expressions ----

    fn expr(&mut self, depth: usize) -> PResult<Typed> {
        let mut left = self.conjunction(depth)?;
        while self.at_keyword("or") {
            self.advance();
            let right = self.conjunction(depth)?;
            let start = left.start;
            left = self.apply_function(OR.to_string(), vec![left, right], start)?;
        }
        Ok(left)
    }

    fn conjunction(&mut self, depth: usize) -> PResult<Typed> {
        let mut left = self.unary(depth)?;
        while self.at_keyword("and") {
            self.advance();
            let right = self.unary(depth)?;
            let start = left.start;
            left = self.apply_function(AND.to_string(), vec![left, right], start)?;
        }
        Ok(left)
    }

    fn unary(&mut self, depth: usize) -> PResult<Typed> {
        if self.at_keyword("not") && !matches!(self.peek2(), Tok::Colon) {
            let start = self.start();
            self.advance();
            self.check_depth(depth + 1, start)?;
            let operand = self.unary(depth + 1)?;
            return self.apply_function(NOT.to_string(), vec![operand], start);
        }
        self.comparison(depth)
    }

    fn comparison(&mut self, depth: usize) -> PResult<Typed> {
        let left = self.primary(depth)?;
        let Some(cmp) = self.comparison_operator() else {
            return Ok(left);
        };
        let op = self.advance();
        let right = self.primary(depth)?;
        let (left, right) = self.promote(self.scalarize(left), self.scalarize(right));
        let (start, end) = (left.start, right.end);
        match (left.ty, right.ty) {
            (Some(ParamType::Scalar(a)), Some(ParamType::Scalar(b))) if a == b => {
                let id = cmp.function_id(a);
                if self.registry.get(&id).is_none() {
                    self.error(
                        format!("operator `{}` is not defined for {a} values", cmp.operator()),
                        op.start,
                        op.end,
                    );
                    return Ok(self.untyped(Expr::apply(id, vec![left.expr, right.expr]), start, end));
                }
                self.apply_function(id, vec![left, right], start)
            }
            (Some(a), Some(b)) => {
                self.error(format!("cannot compare {a} with {b}"), start, end);
                Ok(self.untyped(
                    Expr::apply(cmp.function_id(ValueKind::String), vec![left.expr, right.expr]),
                    start,
                    end,
                ))
            }
            _ => Ok(self.untyped(
                Expr::apply(cmp.function_id(ValueKind::String), vec![left.expr, right.expr]),
                start,
                end,
            )),
        }
    }

    fn comparison_operator(&self) -> Option<Comparison> {
        Some(match self.peek() {
            Tok::EqEq => Comparison::Equal,
            Tok::NotEq => Comparison::NotEqual,
            Tok::Lt => Comparison::LessThan,
            Tok::Le => Comparison::LessOrEqual,
            Tok::Gt => Comparison::GreaterThan,
            Tok::Ge => Comparison::GreaterOrEqual,
            _ => return None,
        })
    }

    fn primary(&mut self, depth: usize) -> PResult<Typed> {
        let start = self.start();
        match (self.peek().clone(), self.peek2().clone()) {
            (Tok::LParen, _) => {
                self.advance();
                self.check_depth(depth + 1, start)?;
                let mut inner = self.expr(depth + 1)?;
                self.expect(Tok::RParen)?;
                inner.start = start;
                inner.end = self.prev_end();
                Ok(inner)
            }
            (Tok::Ident(_), Tok::Dot) => {
                let d = self.designator()?;
                let ty = ParamType::Bag(d.kind);
                Ok(Typed {
                    expr: Expr::Designator(d),
                    ty: Some(ty),
                    depth: 0,
                    start,
                    end: self.prev_end(),
                })
            }
            (Tok::Ident(p), Tok::Colon) if p == "fn" => self.call(depth),
            _ => match self.literal()? {
                Some((value, start, end)) => Ok(Typed {
                    ty: Some(ParamType::Scalar(value.kind())),
                    expr: Expr::Constant(value),
                    depth: 0,
                    start,
                    end,
                }),
                None => Err(self.unexpected("an expression")),
            },
        }
    }

    fn call(&mut self, depth: usize) -> PResult<Typed> {
        let start = self.start();
        self.advance();
        self.expect(Tok::Colon)?;
        let name_tok = self.advance();
        let Tok::Ident(name) = name_tok.tok else {
            self.pos -= 1;
            return Err(self.unexpected("a function name"));
        };
        self.check_depth(depth + 1, start)?;
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.expr(depth + 1)?);
                if *self.peek() == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.apply_function(format!("fn:{name}"), args, start)
    }

    fn check_depth(&mut self, depth: usize, start: usize) -> PResult<()> {
        if depth > MAX_DEPTH {
            let end = self.prev_end();
            return Err(self.fail("expression is nested too deeply", start, end));
        }
        Ok(())
    }

    fn untyped(&self, expr: Expr, start: usize, end: usize) -> Typed {
        Typed {
            expr,
            ty: None,
            depth: 0,
            start,
            end,
        }
    }

    /// Wraps a bag in its `one-and-only` function.
    fn scalarize(&self, t: Typed) -> Typed {
        match t.ty {
            Some(ParamType::Bag(kind)) => Typed {
                expr: Expr::apply(format!("fn:{}-one-and-only", kind.name()), vec![t.expr]),
                ty: Some(ParamType::Scalar(kind)),
                depth: t.depth + 1,
                start: t.start,
                end: t.end,
            },
            _ => t,
        }
    }

    /// Integer literals compared with doubles are read as doubles.
    fn promote(&self, left: Typed, right: Typed) -> (Typed, Typed) {
        let double = Some(ParamType::Scalar(ValueKind::Double));
        if left.ty == double {
            (left, promote_literal(right))
        } else if right.ty == double {
            (promote_literal(left), right)
        } else {
            (left, right)
        }
    }

    fn apply_function(&mut self, function: String, args: Vec<Typed>, start: usize) -> PResult<Typed> {
        let end = self.prev_end().max(start);
        let Some(def) = self.registry.get(&function) else {
            self.error(format!("unknown function `{function}`"), start, end);
            return Ok(self.untyped(
                Expr::apply(function, args.into_iter().map(|a| a.expr).collect()),
                start,
                end,
            ));
        };
        let params = def.params().to_vec();
        let result = def.result();
        if params.len() != args.len() {
            self.error(
                format!("`{function}` takes {} argument(s), got {}", params.len(), args.len()),
                start,
                end,
            );
        }
        let mut exprs = Vec::with_capacity(args.len());
        let mut depth = 0;
        for (i, arg) in args.into_iter().enumerate() {
            let arg = match params.get(i) {
                Some(ParamType::Scalar(kind)) => {
                    let arg = self.scalarize(arg);
                    if *kind == ValueKind::Double {
                        promote_literal(arg)
                    } else {
                        arg
                    }
                }
                _ => arg,
            };
            if let (Some(param), Some(actual)) = (params.get(i), arg.ty) {
                if *param != actual {
                    self.error(
                        format!("argument {} of `{function}` has type {actual}, expected {param}", i + 1),
                        arg.start,
                        arg.end,
                    );
                }
            }
            depth = depth.max(arg.depth + 1);
            exprs.push(arg.expr);
        }
        if depth > MAX_DEPTH {
            return Err(self.fail("expression is nested too deeply", start, end));
        }
        Ok(Typed {
            expr: Expr::apply(function, exprs),
            ty: Some(result),
            depth,
            start,
            end,
        })
    }

    /// `category.attribute:kind[!]`
    fn designator(&mut self) -> PResult<AttributeDesignator> {
        let t = self.advance();
        let Tok::Ident(name) = t.tok else {
            self.pos -= 1;
            return Err(self.unexpected("an attribute category"));
        };
        let category = match name.parse::<Category>() {
            Ok(c) => c,
            Err(_) => {
                return Err(self.fail(
                    format!("unknown category `{name}`; expected subject, resource, action or environment"),
                    t.start,
                    t.end,
                ))
            }
        };
        self.expect(Tok::Dot)?;
        let attribute_id = self.iri()?;
        self.expect(Tok::Colon)?;
        let kind_tok = self.advance();
        let Tok::Ident(kind_name) = kind_tok.tok else {
            self.pos -= 1;
            return Err(self.unexpected("a value kind"));
        };
        let kind = match kind_name.parse::<ValueKind>() {
            Ok(k) if k.is_attribute_kind() => k,
            _ => {
                return Err(self.fail(
                    format!("`{kind_name}` is not an attribute kind"),
                    kind_tok.start,
                    kind_tok.end,
                ))
            }
        };
        let mut d = AttributeDesignator::new(category, attribute_id, kind);
        if *self.peek() == Tok::Bang {
            self.advance();
            d = d.required();
        }
        Ok(d)
    }

    /// `<absolute>` or `prefix:local`.
    fn iri(&mut self) -> PResult<Iri> {
        let t = self.advance();
        match t.tok {
            Tok::IriRef(body) => Iri::new(body).map_err(|e| self.fail(e.to_string(), t.start, t.end)),
            Tok::Ident(prefix) => {
                self.expect(Tok::Colon)?;
                let local_tok = self.advance();
                let Tok::Ident(local) = local_tok.tok else {
                    self.pos -= 1;
                    return Err(self.unexpected("a local name"));
                };
                match self.prefixes.get(&prefix) {
                    Some(ns) => {
                        let iri = format!("{ns}{local}");
                        Iri::new(iri).map_err(|e| self.fail(e.to_string(), t.start, local_tok.end))
                    }
                    None => Err(self.fail(format!("unknown prefix `{prefix}`"), t.start, t.end)),
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("an identifier such as `prefix:name` or `<urn:...>`"))
            }
        }
    }

    /// A literal constant, or `None` (consuming nothing) if the next tokens
    /// do not start one.
    fn literal(&mut self) -> PResult<Option<(AttributeValue, usize, usize)>> {
        let start = self.start();
        let value = match (self.peek().clone(), self.peek2().clone()) {
            (Tok::Str(s), _) => {
                self.advance();
                AttributeValue::String(s)
            }
            (Tok::Int(i), _) => {
                self.advance();
                AttributeValue::Integer(i)
            }
            (Tok::Double(d), _) => {
                self.advance();
                AttributeValue::Double(d)
            }
            (Tok::IriRef(_), _) => AttributeValue::Iri(self.iri()?),
            (Tok::Ident(k), next) if (k == "true" || k == "false") && next != Tok::Colon => {
                self.advance();
                AttributeValue::Boolean(k == "true")
            }
            (Tok::Ident(k), Tok::Str(text)) if k == "dateTime" => {
                self.advance();
                let t = self.advance();
                match Literal::parse_date_time(&text) {
                    Ok(Literal::DateTime(dt)) => AttributeValue::DateTime(dt),
                    Ok(_) => unreachable!("parse_date_time returns a dateTime"),
                    Err(e) => return Err(self.fail(e.to_string(), start, t.end)),
                }
            }
            (Tok::Ident(k), Tok::Str(text)) if k == "duration" => {
                self.advance();
                let t = self.advance();
                match parse_duration(&text) {
                    Ok(ms) => AttributeValue::Duration(ms),
                    Err(e) => return Err(self.fail(e, start, t.end)),
                }
            }
            (Tok::Ident(k), Tok::LParen) if k == "point" => {
                self.advance();
                self.advance();
                let lat = self.number()?;
                self.expect(Tok::Comma)?;
                let lon = self.number()?;
                self.expect(Tok::RParen)?;
                let end = self.prev_end();
                match GeoPoint::new(lat, lon) {
                    Ok(p) => AttributeValue::GeoPoint(p),
                    Err(e) => return Err(self.fail(e.to_string(), start, end)),
                }
            }
            (Tok::Ident(p), Tok::Colon) if p != "fn" => AttributeValue::Iri(self.iri()?),
            _ => return Ok(None),
        };
        Ok(Some((value, start, self.prev_end())))
    }

    fn number(&mut self) -> PResult<f64> {
        match *self.peek() {
            Tok::Int(i) => {
                self.advance();
                Ok(i as f64)
            }
            Tok::Double(d) => {
                self.advance();
                Ok(d)
            }
            _ => Err(self.unexpected("a number")),
        }
    }
}

fn promote_literal(t: Typed) -> Typed {
    match t.expr {
        Expr::Constant(AttributeValue::Integer(i)) => Typed {
            expr: Expr::Constant(AttributeValue::Double(i as f64)),
            ty: Some(ParamType::Scalar(ValueKind::Double)),
            ..t
        },
        _ => t,
    }
}
