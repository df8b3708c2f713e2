use super::{ClassExpression, Iri, Literal, LiteralKind};

/// One statement of a knowledge base.
///
/// `DeclareClass` records the `classes` section of a document so that a
/// document survives a load/serialize round trip.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    DeclareClass(Iri),
    SubClassOf {
        sub: ClassExpression,
        sup: Iri,
    },
    EquivalentClass {
        name: Iri,
        definition: ClassExpression,
    },
    DeclareObjectProperty {
        property: Iri,
        domain: Option<Iri>,
        range: Option<Iri>,
    },
    DeclareDataProperty {
        property: Iri,
        domain: Option<Iri>,
        range: Option<LiteralKind>,
    },
    ClassAssertion {
        class: Iri,
        individual: Iri,
    },
    ObjectPropertyAssertion {
        property: Iri,
        subject: Iri,
        object: Iri,
    },
    DataPropertyAssertion {
        property: Iri,
        subject: Iri,
        value: Literal,
    },
}

impl Axiom {
    pub fn sub_class_of(sub: Iri, sup: Iri) -> Axiom {
        Axiom::SubClassOf {
            sub: ClassExpression::Named(sub),
            sup,
        }
    }

    pub fn class_assertion(class: Iri, individual: Iri) -> Axiom {
        Axiom::ClassAssertion { class, individual }
    }
}

/// A property assertion about an individual that is being added.
#[derive(Clone, Debug, PartialEq)]
pub enum PropertyAssertion {
    Object { property: Iri, object: Iri },
    Data { property: Iri, value: Literal },
}

impl PropertyAssertion {
    pub fn property(&self) -> &Iri {
        match self {
            PropertyAssertion::Object { property, .. } | PropertyAssertion::Data { property, .. } => property,
        }
    }

    pub(crate) fn into_axiom(self, subject: Iri) -> Axiom {
        match self {
            PropertyAssertion::Object { property, object } => Axiom::ObjectPropertyAssertion {
                property,
                subject,
                object,
            },
            PropertyAssertion::Data { property, value } => Axiom::DataPropertyAssertion {
                property,
                subject,
                value,
            },
        }
    }
}
