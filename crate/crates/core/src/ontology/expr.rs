use std::fmt;

use super::{Iri, Literal, OntologyError};

/// Object of a property assertion or a value restriction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Iri(Iri),
    Literal(Literal),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Iri(iri) => write!(f, "{iri}"),
            Value::Literal(lit) => write!(f, "{lit}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparator {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }

    pub fn parse(symbol: &str) -> Result<Self, OntologyError> {
        Ok(match symbol {
            "=" => Comparator::Eq,
            "!=" => Comparator::Ne,
            "<" => Comparator::Lt,
            "<=" => Comparator::Le,
            ">" => Comparator::Gt,
            ">=" => Comparator::Ge,
            other => {
                return Err(OntologyError::InvalidExpression(format!(
                    "unknown comparator `{other}`"
                )))
            }
        })
    }

    pub fn is_equality(self) -> bool {
        matches!(self, Comparator::Eq | Comparator::Ne)
    }

    /// Applies the comparator to `value` (left) and `bound` (right). `None`
    /// when the two literals are not comparable under this comparator.
    pub fn holds(self, value: &Literal, bound: &Literal) -> Option<bool> {
        if value.kind() != bound.kind() {
            return None;
        }
        match self {
            Comparator::Eq => Some(value == bound),
            Comparator::Ne => Some(value != bound),
            _ => {
                let ord = value.partial_compare(bound)?;
                Some(match self {
                    Comparator::Lt => ord.is_lt(),
                    Comparator::Le => ord.is_le(),
                    Comparator::Gt => ord.is_gt(),
                    Comparator::Ge => ord.is_ge(),
                    Comparator::Eq | Comparator::Ne => unreachable!(),
                })
            }
        }
    }
}

/// A description of a set of individuals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassExpression {
    Named(Iri),
    IntersectionOf(Vec<ClassExpression>),
    SomeValuesFrom {
        property: Iri,
        filler: Box<ClassExpression>,
    },
    HasValue {
        property: Iri,
        value: Value,
    },
    DataRestriction {
        property: Iri,
        comparator: Comparator,
        bound: Literal,
    },
}

impl ClassExpression {
    pub fn named(iri: Iri) -> Self {
        ClassExpression::Named(iri)
    }

    pub fn some(property: Iri, filler: ClassExpression) -> Self {
        ClassExpression::SomeValuesFrom {
            property,
            filler: Box::new(filler),
        }
    }

    /// Checks the structural invariants: intersections have at least two
    /// operands and ordered comparators only bound ordered literal kinds.
    pub fn validate(&self) -> Result<(), OntologyError> {
        match self {
            ClassExpression::Named(_) | ClassExpression::HasValue { .. } => Ok(()),
            ClassExpression::IntersectionOf(parts) => {
                if parts.len() < 2 {
                    return Err(OntologyError::InvalidExpression(format!(
                        "intersection needs at least 2 operands, got {}",
                        parts.len()
                    )));
                }
                parts.iter().try_for_each(ClassExpression::validate)
            }
            ClassExpression::SomeValuesFrom { filler, .. } => filler.validate(),
            ClassExpression::DataRestriction { comparator, bound, .. } => {
                if !comparator.is_equality() && !bound.kind().is_ordered() {
                    return Err(OntologyError::InvalidExpression(format!(
                        "comparator `{}` is not defined for {} literals",
                        comparator.symbol(),
                        bound.kind()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Named classes mentioned anywhere in the expression.
    pub fn named_classes(&self) -> Vec<&Iri> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let ClassExpression::Named(iri) = e {
                out.push(iri);
            }
        });
        out
    }

    /// Properties mentioned anywhere in the expression.
    pub fn properties(&self) -> Vec<&Iri> {
        let mut out = Vec::new();
        self.visit(&mut |e| match e {
            ClassExpression::SomeValuesFrom { property, .. }
            | ClassExpression::HasValue { property, .. }
            | ClassExpression::DataRestriction { property, .. } => out.push(property),
            _ => {}
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a ClassExpression)) {
        f(self);
        match self {
            ClassExpression::IntersectionOf(parts) => parts.iter().for_each(|p| p.visit(f)),
            ClassExpression::SomeValuesFrom { filler, .. } => filler.visit(f),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("urn:t:{s}")).unwrap()
    }

    #[test]
    fn intersection_arity_is_checked() {
        let single = ClassExpression::IntersectionOf(vec![ClassExpression::Named(iri("A"))]);
        assert!(single.validate().is_err());
    }

    #[test]
    fn ordered_comparator_needs_ordered_kind() {
        let bad = ClassExpression::DataRestriction {
            property: iri("p"),
            comparator: Comparator::Lt,
            bound: Literal::String("x".into()),
        };
        assert!(bad.validate().is_err());
        let good = ClassExpression::DataRestriction {
            property: iri("p"),
            comparator: Comparator::Ne,
            bound: Literal::String("x".into()),
        };
        assert!(good.validate().is_ok());
    }

    #[test]
    fn comparator_semantics() {
        let two = Literal::Integer(2);
        let three = Literal::Integer(3);
        assert_eq!(Comparator::Lt.holds(&two, &three), Some(true));
        assert_eq!(Comparator::Ge.holds(&two, &three), Some(false));
        assert_eq!(Comparator::Ne.holds(&two, &three), Some(true));
        assert_eq!(Comparator::Eq.holds(&two, &Literal::Double(2.0)), None);
    }
}
