//! Policy object model and evaluation.

mod eval;
mod model;
mod value;

pub use eval::{
    combine, evaluate_policy_tree, evaluate_rule, AttributeResolver, Decision, DecisionValue, EvalError, Evaluator,
    ResolveError, TraceEntry,
};
pub(crate) use model::check_match;
pub use model::{
    type_of, AttributeDesignator, CombiningAlgorithm, Effect, Expr, Match, Policy, PolicyError, PolicyNode, PolicySet,
    Rule, ROOT_ID,
};
pub use value::{AttributeValue, Category, ValueKind};

#[cfg(test)]
mod tests;
