use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};

use crate::ontology::{format_date_time, GeoPoint, Iri, Literal, LiteralKind, Value};
use crate::vocab;

/// XACML attribute category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Subject,
    Resource,
    Action,
    Environment,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Subject,
        Category::Resource,
        Category::Action,
        Category::Environment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Subject => "subject",
            Category::Resource => "resource",
            Category::Action => "action",
            Category::Environment => "environment",
        }
    }

    /// Class given to the request-ontology individual of this category.
    pub fn class_iri(self) -> Iri {
        let s = match self {
            Category::Subject => vocab::SUBJECT,
            Category::Resource => vocab::RESOURCE,
            Category::Action => vocab::ACTION,
            Category::Environment => vocab::ENVIRONMENT,
        };
        Iri::new(s).expect("vocabulary constant")
    }

    /// Property linking the request individual to the category individual.
    pub fn link_property(self) -> Iri {
        let s = match self {
            Category::Subject => vocab::HAS_SUBJECT,
            Category::Resource => vocab::HAS_RESOURCE,
            Category::Action => vocab::HAS_ACTION,
            Category::Environment => vocab::HAS_ENVIRONMENT,
        };
        Iri::new(s).expect("vocabulary constant")
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueKind {
    String,
    Integer,
    Double,
    Boolean,
    DateTime,
    GeoPoint,
    Iri,
    /// Milliseconds. Only appears as a constant.
    Duration,
}

impl ValueKind {
    pub const ALL: [ValueKind; 8] = [
        ValueKind::String,
        ValueKind::Integer,
        ValueKind::Double,
        ValueKind::Boolean,
        ValueKind::DateTime,
        ValueKind::GeoPoint,
        ValueKind::Iri,
        ValueKind::Duration,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ValueKind::String => "string",
            ValueKind::Integer => "integer",
            ValueKind::Double => "double",
            ValueKind::Boolean => "boolean",
            ValueKind::DateTime => "dateTime",
            ValueKind::GeoPoint => "geoPoint",
            ValueKind::Iri => "iri",
            ValueKind::Duration => "duration",
        }
    }

    /// Kinds that an attribute (as opposed to a constant) may carry.
    pub fn is_attribute_kind(self) -> bool {
        self != ValueKind::Duration
    }

    pub fn from_literal_kind(kind: LiteralKind) -> ValueKind {
        match kind {
            LiteralKind::String => ValueKind::String,
            LiteralKind::Integer => ValueKind::Integer,
            LiteralKind::Double => ValueKind::Double,
            LiteralKind::Boolean => ValueKind::Boolean,
            LiteralKind::DateTime => ValueKind::DateTime,
            LiteralKind::GeoPoint => ValueKind::GeoPoint,
        }
    }
}

impl FromStr for ValueKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ValueKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown kind `{s}`"))
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single typed attribute value.
#[derive(Clone, Debug)]
pub enum AttributeValue {
    String(String),
    Integer(i64),
    Double(f64),
    Boolean(bool),
    DateTime(DateTime<Utc>),
    GeoPoint(GeoPoint),
    Iri(Iri),
    Duration(i64),
}

impl AttributeValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            AttributeValue::String(_) => ValueKind::String,
            AttributeValue::Integer(_) => ValueKind::Integer,
            AttributeValue::Double(_) => ValueKind::Double,
            AttributeValue::Boolean(_) => ValueKind::Boolean,
            AttributeValue::DateTime(_) => ValueKind::DateTime,
            AttributeValue::GeoPoint(_) => ValueKind::GeoPoint,
            AttributeValue::Iri(_) => ValueKind::Iri,
            AttributeValue::Duration(_) => ValueKind::Duration,
        }
    }

    pub fn from_literal(literal: Literal) -> AttributeValue {
        match literal {
            Literal::String(s) => AttributeValue::String(s),
            Literal::Integer(i) => AttributeValue::Integer(i),
            Literal::Double(d) => AttributeValue::Double(d),
            Literal::Boolean(b) => AttributeValue::Boolean(b),
            Literal::DateTime(dt) => AttributeValue::DateTime(dt),
            Literal::GeoPoint(p) => AttributeValue::GeoPoint(p),
        }
    }

    /// Converts an ontology value to an attribute value of `kind`; `None` when
    /// the value does not have that kind.
    pub fn from_ontology(value: Value, kind: ValueKind) -> Option<AttributeValue> {
        let converted = match value {
            Value::Iri(iri) => AttributeValue::Iri(iri),
            Value::Literal(l) => AttributeValue::from_literal(l),
        };
        (converted.kind() == kind).then_some(converted)
    }

    /// The ontology form, for attributes that are asserted into a request
    /// ontology. Durations have none.
    pub fn to_ontology(&self) -> Option<Value> {
        Some(match self {
            AttributeValue::String(s) => Value::Literal(Literal::String(s.clone())),
            AttributeValue::Integer(i) => Value::Literal(Literal::Integer(*i)),
            AttributeValue::Double(d) => Value::Literal(Literal::Double(*d)),
            AttributeValue::Boolean(b) => Value::Literal(Literal::Boolean(*b)),
            AttributeValue::DateTime(dt) => Value::Literal(Literal::DateTime(*dt)),
            AttributeValue::GeoPoint(p) => Value::Literal(Literal::GeoPoint(*p)),
            AttributeValue::Iri(i) => Value::Iri(i.clone()),
            AttributeValue::Duration(_) => return None,
        })
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            AttributeValue::Boolean(b) => Some(*b),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        self.kind() as u8
    }
}

/// Structural equality; doubles compare by bit pattern via total order.
impl PartialEq for AttributeValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AttributeValue {}

impl PartialOrd for AttributeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AttributeValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use AttributeValue as V;
        match (self, other) {
            (V::String(a), V::String(b)) => a.cmp(b),
            (V::Integer(a), V::Integer(b)) => a.cmp(b),
            (V::Double(a), V::Double(b)) => a.total_cmp(b),
            (V::Boolean(a), V::Boolean(b)) => a.cmp(b),
            (V::DateTime(a), V::DateTime(b)) => a.cmp(b),
            (V::GeoPoint(a), V::GeoPoint(b)) => a.lat().total_cmp(&b.lat()).then_with(|| a.lon().total_cmp(&b.lon())),
            (V::Iri(a), V::Iri(b)) => a.cmp(b),
            (V::Duration(a), V::Duration(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::String(s) => write!(f, "{s:?}"),
            AttributeValue::Integer(i) => write!(f, "{i}"),
            AttributeValue::Double(d) => write!(f, "{d:?}"),
            AttributeValue::Boolean(b) => write!(f, "{b}"),
            AttributeValue::DateTime(dt) => f.write_str(&format_date_time(dt)),
            AttributeValue::GeoPoint(p) => write!(f, "point({:?}, {:?})", p.lat(), p.lon()),
            AttributeValue::Iri(i) => write!(f, "{i}"),
            AttributeValue::Duration(ms) => write!(f, "{ms}ms"),
        }
    }
}
