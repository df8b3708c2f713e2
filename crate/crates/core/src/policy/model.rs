use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{AttributeValue, Category, ValueKind};
use crate::functions::{FunctionRegistry, ParamType};
use crate::ontology::Iri;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeDesignator {
    pub category: Category,
    pub attribute_id: Iri,
    pub kind: ValueKind,
    pub must_be_present: bool,
}

impl AttributeDesignator {
    pub fn new(category: Category, attribute_id: Iri, kind: ValueKind) -> Self {
        AttributeDesignator {
            category,
            attribute_id,
            kind,
            must_be_present: false,
        }
    }

    pub fn required(mut self) -> Self {
        self.must_be_present = true;
        self
    }
}

/// Condition expression tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Apply { function: String, args: Vec<Expr> },
    Designator(AttributeDesignator),
    Constant(AttributeValue),
}

impl Expr {
    pub fn apply(function: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Apply {
            function: function.into(),
            args,
        }
    }
}

/// `matcher(attribute value, constant)` must hold for some value of the
/// designated attribute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub designator: AttributeDesignator,
    pub matcher: String,
    pub value: AttributeValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Effect {
    Permit,
    Deny,
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Effect::Permit => "permit",
            Effect::Deny => "deny",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CombiningAlgorithm {
    DenyOverrides,
    PermitOverrides,
    FirstApplicable,
}

impl CombiningAlgorithm {
    pub const ALL: [CombiningAlgorithm; 3] = [
        CombiningAlgorithm::DenyOverrides,
        CombiningAlgorithm::PermitOverrides,
        CombiningAlgorithm::FirstApplicable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CombiningAlgorithm::DenyOverrides => "denyOverrides",
            CombiningAlgorithm::PermitOverrides => "permitOverrides",
            CombiningAlgorithm::FirstApplicable => "firstApplicable",
        }
    }
}

impl FromStr for CombiningAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CombiningAlgorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown combining algorithm `{s}`"))
    }
}

impl fmt::Display for CombiningAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub effect: Effect,
    /// Conjunction of matches; empty matches everything.
    pub target: Vec<Match>,
    /// Absent condition evaluates to true.
    pub condition: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    pub id: String,
    pub target: Vec<Match>,
    pub combining: CombiningAlgorithm,
    pub rules: Vec<Rule>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicySet {
    pub id: String,
    pub target: Vec<Match>,
    pub combining: CombiningAlgorithm,
    pub children: Vec<PolicyNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolicyNode {
    Policy(Policy),
    Set(PolicySet),
}

impl PolicyNode {
    pub fn id(&self) -> &str {
        match self {
            PolicyNode::Policy(p) => &p.id,
            PolicyNode::Set(s) => &s.id,
        }
    }
}

/// Id of the implicit root set of a policy document.
pub const ROOT_ID: &str = "root";

impl PolicySet {
    /// A set with no children and first-applicable combining.
    pub fn empty(id: impl Into<String>) -> PolicySet {
        PolicySet {
            id: id.into(),
            target: Vec::new(),
            combining: CombiningAlgorithm::FirstApplicable,
            children: Vec::new(),
        }
    }

    /// Combines several documents into one set evaluated in the given order
    /// with first-applicable, so earlier documents take priority.
    pub fn ordered(sets: Vec<PolicySet>) -> PolicySet {
        match <[PolicySet; 1]>::try_from(sets) {
            Ok([single]) => single,
            Err(sets) => {
                let mut root = PolicySet::empty(ROOT_ID);
                let mut used = BTreeSet::new();
                for (i, mut set) in sets.into_iter().enumerate() {
                    if !used.insert(set.id.clone()) {
                        set.id = format!("{}.{}", set.id, i + 1);
                        used.insert(set.id.clone());
                    }
                    root.children.push(PolicyNode::Set(set));
                }
                root
            }
        }
    }

    /// Checks id uniqueness and type-checks every target and condition.
    pub fn validate(&self, registry: &FunctionRegistry) -> Vec<PolicyError> {
        let mut errors = Vec::new();
        validate_set(self, registry, &self.id, &mut errors);
        errors
    }

    pub fn rule_count(&self) -> usize {
        self.children
            .iter()
            .map(|c| match c {
                PolicyNode::Policy(p) => p.rules.len(),
                PolicyNode::Set(s) => s.rule_count(),
            })
            .sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolicyError {
    #[error("{path}: duplicate child id `{id}`")]
    DuplicateId { path: String, id: String },
    #[error("{path}: {message}")]
    Type { path: String, message: String },
}

fn validate_set(set: &PolicySet, registry: &FunctionRegistry, path: &str, errors: &mut Vec<PolicyError>) {
    check_target(&set.target, registry, path, errors);
    check_unique(set.children.iter().map(PolicyNode::id), path, errors);
    for child in &set.children {
        let child_path = format!("{path}/{}", child.id());
        match child {
            PolicyNode::Set(s) => validate_set(s, registry, &child_path, errors),
            PolicyNode::Policy(p) => {
                check_target(&p.target, registry, &child_path, errors);
                check_unique(p.rules.iter().map(|r| r.id.as_str()), &child_path, errors);
                for rule in &p.rules {
                    let rule_path = format!("{child_path}/{}", rule.id);
                    check_target(&rule.target, registry, &rule_path, errors);
                    if let Some(cond) = &rule.condition {
                        match type_of(cond, registry) {
                            Ok(ParamType::BOOLEAN) => {}
                            Ok(other) => errors.push(PolicyError::Type {
                                path: rule_path,
                                message: format!("condition has type {other}, expected boolean"),
                            }),
                            Err(message) => errors.push(PolicyError::Type {
                                path: rule_path,
                                message,
                            }),
                        }
                    }
                }
            }
        }
    }
}

fn check_unique<'a>(ids: impl Iterator<Item = &'a str>, path: &str, errors: &mut Vec<PolicyError>) {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            errors.push(PolicyError::DuplicateId {
                path: path.to_string(),
                id: id.to_string(),
            });
        }
    }
}

fn check_target(target: &[Match], registry: &FunctionRegistry, path: &str, errors: &mut Vec<PolicyError>) {
    for m in target {
        if let Err(message) = check_match(m, registry) {
            errors.push(PolicyError::Type {
                path: path.to_string(),
                message,
            });
        }
    }
}

pub(crate) fn check_match(m: &Match, registry: &FunctionRegistry) -> Result<(), String> {
    let f = registry
        .get(&m.matcher)
        .ok_or_else(|| format!("unknown function `{}`", m.matcher))?;
    let expected = [ParamType::Scalar(m.designator.kind), ParamType::Scalar(m.value.kind())];
    if f.params() != expected || f.result() != ParamType::BOOLEAN {
        return Err(format!(
            "`{}` cannot match a {} attribute against a {} value",
            m.matcher,
            m.designator.kind,
            m.value.kind()
        ));
    }
    Ok(())
}

/// Static type of an expression against `registry`.
pub fn type_of(expr: &Expr, registry: &FunctionRegistry) -> Result<ParamType, String> {
    match expr {
        Expr::Constant(v) => Ok(ParamType::Scalar(v.kind())),
        Expr::Designator(d) => Ok(ParamType::Bag(d.kind)),
        Expr::Apply { function, args } => {
            let f = registry
                .get(function)
                .ok_or_else(|| format!("unknown function `{function}`"))?;
            if f.params().len() != args.len() {
                return Err(format!(
                    "`{function}` takes {} argument(s), got {}",
                    f.params().len(),
                    args.len()
                ));
            }
            for (i, (arg, param)) in args.iter().zip(f.params()).enumerate() {
                let actual = type_of(arg, registry)?;
                if actual != *param {
                    return Err(format!(
                        "argument {} of `{function}` has type {actual}, expected {param}",
                        i + 1
                    ));
                }
            }
            Ok(f.result())
        }
    }
}
