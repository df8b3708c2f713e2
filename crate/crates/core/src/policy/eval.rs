use std::cell::RefCell;
use std::fmt;

use thiserror::Error;

use super::{
    AttributeDesignator, AttributeValue, CombiningAlgorithm, Effect, Expr, Match, Policy, PolicyNode, PolicySet, Rule,
};
use crate::functions::{self, Evaluated, FunctionError, FunctionRegistry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecisionValue {
    Permit,
    Deny,
    NotApplicable,
    Indeterminate,
}

impl DecisionValue {
    pub const ALL: [DecisionValue; 4] = [
        DecisionValue::Permit,
        DecisionValue::Deny,
        DecisionValue::NotApplicable,
        DecisionValue::Indeterminate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecisionValue::Permit => "Permit",
            DecisionValue::Deny => "Deny",
            DecisionValue::NotApplicable => "NotApplicable",
            DecisionValue::Indeterminate => "Indeterminate",
        }
    }
}

impl fmt::Display for DecisionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of evaluating a rule, policy or policy set. Indeterminate
/// decisions always carry a status message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    value: DecisionValue,
    status: Option<String>,
}

impl Decision {
    pub const PERMIT: Decision = Decision {
        value: DecisionValue::Permit,
        status: None,
    };
    pub const DENY: Decision = Decision {
        value: DecisionValue::Deny,
        status: None,
    };
    pub const NOT_APPLICABLE: Decision = Decision {
        value: DecisionValue::NotApplicable,
        status: None,
    };

    pub fn indeterminate(status: impl Into<String>) -> Decision {
        Decision {
            value: DecisionValue::Indeterminate,
            status: Some(status.into()),
        }
    }

    pub fn from_effect(effect: Effect) -> Decision {
        match effect {
            Effect::Permit => Decision::PERMIT,
            Effect::Deny => Decision::DENY,
        }
    }

    /// Builds a decision from its parts; an indeterminate value without a
    /// status gets a generic one.
    pub fn new(value: DecisionValue, status: Option<String>) -> Decision {
        match (value, status) {
            (DecisionValue::Indeterminate, None) => Decision::indeterminate("indeterminate"),
            (value, status) => Decision { value, status },
        }
    }

    pub fn value(&self) -> DecisionValue {
        self.value
    }

    pub fn status(&self) -> Option<&str> {
        self.status.as_deref()
    }
}

impl From<DecisionValue> for Decision {
    fn from(value: DecisionValue) -> Self {
        Decision::new(value, None)
    }
}

/// Merges child decisions.
pub fn combine(algorithm: CombiningAlgorithm, children: &[Decision]) -> Decision {
    let find = |v: DecisionValue| children.iter().find(|d| d.value == v).cloned();
    match algorithm {
        CombiningAlgorithm::DenyOverrides => find(DecisionValue::Deny)
            .or_else(|| find(DecisionValue::Indeterminate))
            .or_else(|| find(DecisionValue::Permit)),
        CombiningAlgorithm::PermitOverrides => find(DecisionValue::Permit)
            .or_else(|| find(DecisionValue::Indeterminate))
            .or_else(|| find(DecisionValue::Deny)),
        CombiningAlgorithm::FirstApplicable => children
            .iter()
            .find(|d| d.value != DecisionValue::NotApplicable)
            .cloned(),
    }
    .unwrap_or(Decision::NOT_APPLICABLE)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct ResolveError(pub String);

/// Source of attribute values during evaluation. Must tolerate re-entrant
/// calls.
pub trait AttributeResolver {
    /// The bag of values for the designated attribute. An empty bag means
    /// the attribute is absent.
    fn resolve(&self, designator: &AttributeDesignator) -> Result<Vec<AttributeValue>, ResolveError>;
}

impl<F> AttributeResolver for F
where
    F: Fn(&AttributeDesignator) -> Result<Vec<AttributeValue>, ResolveError>,
{
    fn resolve(&self, designator: &AttributeDesignator) -> Result<Vec<AttributeValue>, ResolveError> {
        self(designator)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("missing attribute {category}.{attribute}")]
    MissingAttribute { category: String, attribute: String },
    #[error("cannot resolve {attribute}: {message}")]
    Resolution { attribute: String, message: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("{function}: {source}")]
    Function {
        function: String,
        #[source]
        source: FunctionError,
    },
}

/// One rule evaluation observed while walking a policy tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    /// Ids of the enclosing sets and policy, outermost first.
    pub path: Vec<String>,
    pub rule: String,
    pub decision: DecisionValue,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} -> {}", self.path.join("/"), self.rule, self.decision)
    }
}

/// Walks rules and policy trees against one resolver.
pub struct Evaluator<'a> {
    registry: &'a FunctionRegistry,
    resolver: &'a dyn AttributeResolver,
    trace: Option<RefCell<Vec<TraceEntry>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(registry: &'a FunctionRegistry, resolver: &'a dyn AttributeResolver) -> Self {
        Evaluator {
            registry,
            resolver,
            trace: None,
        }
    }

    pub fn traced(mut self) -> Self {
        self.trace = Some(RefCell::new(Vec::new()));
        self
    }

    pub fn into_trace(self) -> Vec<TraceEntry> {
        self.trace.map(RefCell::into_inner).unwrap_or_default()
    }

    pub fn evaluate_tree(&self, root: &PolicySet) -> Decision {
        let mut path = Vec::new();
        self.policy_set(root, &mut path)
    }

    fn policy_set(&self, set: &PolicySet, path: &mut Vec<String>) -> Decision {
        match self.target(&set.target) {
            Err(e) => return Decision::indeterminate(format!("policy set {}: {e}", set.id)),
            Ok(false) => return Decision::NOT_APPLICABLE,
            Ok(true) => {}
        }
        path.push(set.id.clone());
        let decisions = self.children(set.combining, set.children.iter(), |child| match child {
            PolicyNode::Policy(p) => self.policy(p, path),
            PolicyNode::Set(s) => self.policy_set(s, path),
        });
        path.pop();
        decisions
    }

    fn policy(&self, policy: &Policy, path: &mut Vec<String>) -> Decision {
        match self.target(&policy.target) {
            Err(e) => return Decision::indeterminate(format!("policy {}: {e}", policy.id)),
            Ok(false) => return Decision::NOT_APPLICABLE,
            Ok(true) => {}
        }
        path.push(policy.id.clone());
        let decision = self.children(policy.combining, policy.rules.iter(), |rule| {
            let decision = self.rule(rule);
            if let Some(trace) = &self.trace {
                trace.borrow_mut().push(TraceEntry {
                    path: path.clone(),
                    rule: rule.id.clone(),
                    decision: decision.value(),
                });
            }
            decision
        });
        path.pop();
        decision
    }

    /// Evaluates children lazily: first-applicable stops at the first
    /// applicable child, the override algorithms at their overriding value.
    fn children<T>(
        &self,
        algorithm: CombiningAlgorithm,
        children: impl Iterator<Item = T>,
        mut eval: impl FnMut(T) -> Decision,
    ) -> Decision {
        let stop = match algorithm {
            CombiningAlgorithm::DenyOverrides => Some(DecisionValue::Deny),
            CombiningAlgorithm::PermitOverrides => Some(DecisionValue::Permit),
            CombiningAlgorithm::FirstApplicable => None,
        };
        let mut seen = Vec::new();
        for child in children {
            let d = eval(child);
            let done = match stop {
                Some(v) => d.value() == v,
                None => d.value() != DecisionValue::NotApplicable,
            };
            seen.push(d);
            if done {
                break;
            }
        }
        combine(algorithm, &seen)
    }

    pub fn rule(&self, rule: &Rule) -> Decision {
        match self.target(&rule.target) {
            Err(e) => return Decision::indeterminate(format!("rule {}: {e}", rule.id)),
            Ok(false) => return Decision::NOT_APPLICABLE,
            Ok(true) => {}
        }
        let Some(condition) = &rule.condition else {
            return Decision::from_effect(rule.effect);
        };
        match self.expr(condition).and_then(|v| {
            v.as_bool().map_err(|source| EvalError::Function {
                function: "condition".into(),
                source,
            })
        }) {
            Ok(true) => Decision::from_effect(rule.effect),
            Ok(false) => Decision::NOT_APPLICABLE,
            Err(e) => Decision::indeterminate(format!("rule {}: {e}", rule.id)),
        }
    }

    fn target(&self, target: &[Match]) -> Result<bool, EvalError> {
        for m in target {
            let matcher = self
                .registry
                .get(&m.matcher)
                .ok_or_else(|| EvalError::UnknownFunction(m.matcher.clone()))?;
            let bag = self.designator(&m.designator)?;
            let hit = functions::any_of(matcher, &bag, &m.value).map_err(|source| EvalError::Function {
                function: m.matcher.clone(),
                source,
            })?;
            if !hit {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn designator(&self, d: &AttributeDesignator) -> Result<Vec<AttributeValue>, EvalError> {
        let bag = match self.resolver.resolve(d) {
            Ok(bag) => bag,
            Err(e) if d.must_be_present => {
                return Err(EvalError::Resolution {
                    attribute: d.attribute_id.to_string(),
                    message: e.0,
                })
            }
            Err(e) => {
                tracing::debug!(attribute = %d.attribute_id, error = %e, "treating unresolvable attribute as absent");
                Vec::new()
            }
        };
        if bag.is_empty() && d.must_be_present {
            return Err(EvalError::MissingAttribute {
                category: d.category.to_string(),
                attribute: d.attribute_id.to_string(),
            });
        }
        if let Some(bad) = bag.iter().find(|v| v.kind() != d.kind) {
            return Err(EvalError::Resolution {
                attribute: d.attribute_id.to_string(),
                message: format!("value {bad} is not a {}", d.kind),
            });
        }
        Ok(bag)
    }

    fn expr(&self, expr: &Expr) -> Result<Evaluated, EvalError> {
        match expr {
            Expr::Constant(v) => Ok(Evaluated::Scalar(v.clone())),
            Expr::Designator(d) => self.designator(d).map(Evaluated::Bag),
            Expr::Apply { function, args } => {
                let def = self
                    .registry
                    .get(function)
                    .ok_or_else(|| EvalError::UnknownFunction(function.clone()))?;
                let fail = |source| EvalError::Function {
                    function: function.clone(),
                    source,
                };
                // and/or short-circuit left to right
                if args.len() == 2 && (function == functions::AND || function == functions::OR) {
                    let short = function == functions::OR;
                    let first = self.expr(&args[0])?.as_bool().map_err(fail)?;
                    if first == short {
                        return Ok(Evaluated::Scalar(AttributeValue::Boolean(short)));
                    }
                    let second = self.expr(&args[1])?;
                    second.as_bool().map_err(fail)?;
                    return Ok(second);
                }
                let values = args.iter().map(|a| self.expr(a)).collect::<Result<Vec<_>, _>>()?;
                def.call(&values).map_err(fail)
            }
        }
    }
}

/// Evaluates a single rule with the standard function registry.
pub fn evaluate_rule(rule: &Rule, resolver: &dyn AttributeResolver) -> Decision {
    Evaluator::new(FunctionRegistry::standard(), resolver).rule(rule)
}

/// Evaluates a policy tree with the standard function registry.
pub fn evaluate_policy_tree(root: &PolicySet, resolver: &dyn AttributeResolver) -> Decision {
    Evaluator::new(FunctionRegistry::standard(), resolver).evaluate_tree(root)
}
