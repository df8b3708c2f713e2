//! Function library for policy conditions and target matches.
//!
//! Every function is registered under a stable `fn:` identifier together
//! with its signature; policies are type-checked against the registry when
//! they are loaded.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use chrono::{DateTime, Duration, Utc};
use thiserror::Error;

use crate::ontology::GeoPoint;
use crate::policy::{AttributeValue, ValueKind};

/// Mean Earth radius in metres.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Great-circle distance in metres (haversine, spherical Earth).
pub fn geo_distance(a: &GeoPoint, b: &GeoPoint) -> f64 {
    let (phi1, phi2) = (a.lat().to_radians(), b.lat().to_radians());
    let d_phi = phi2 - phi1;
    let d_lambda = (b.lon() - a.lon()).to_radians();
    let h = (d_phi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (d_lambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

pub fn geo_within_distance(a: &GeoPoint, b: &GeoPoint, radius_m: f64) -> Result<bool, FunctionError> {
    if radius_m.is_nan() || radius_m < 0.0 {
        return Err(FunctionError::Domain(format!("negative radius {radius_m}")));
    }
    Ok(geo_distance(a, b) <= radius_m)
}

/// `center - half_width <= t <= center + half_width`, bounds inclusive.
pub fn time_within_window(
    t: &DateTime<Utc>,
    center: &DateTime<Utc>,
    half_width_ms: i64,
) -> Result<bool, FunctionError> {
    if half_width_ms < 0 {
        return Err(FunctionError::Domain(format!(
            "negative window half-width {half_width_ms} ms"
        )));
    }
    let half = Duration::milliseconds(half_width_ms);
    Ok(*center - half <= *t && *t <= *center + half)
}

pub fn bag_contains(bag: &[AttributeValue], value: &AttributeValue) -> bool {
    bag.iter().any(|v| v == value)
}

/// True iff `matcher(element, constant)` holds for some element of `bag`.
pub fn any_of(matcher: &FunctionDef, bag: &[AttributeValue], constant: &AttributeValue) -> Result<bool, FunctionError> {
    for element in bag {
        let out = matcher.call(&[Evaluated::Scalar(element.clone()), Evaluated::Scalar(constant.clone())])?;
        if out.as_bool()? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamType {
    Scalar(ValueKind),
    Bag(ValueKind),
}

impl ParamType {
    pub const BOOLEAN: ParamType = ParamType::Scalar(ValueKind::Boolean);
}

impl fmt::Display for ParamType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamType::Scalar(k) => write!(f, "{k}"),
            ParamType::Bag(k) => write!(f, "bag<{k}>"),
        }
    }
}

/// Result of evaluating a sub-expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Evaluated {
    Scalar(AttributeValue),
    Bag(Vec<AttributeValue>),
}

impl Evaluated {
    pub fn as_bool(&self) -> Result<bool, FunctionError> {
        match self {
            Evaluated::Scalar(AttributeValue::Boolean(b)) => Ok(*b),
            other => Err(FunctionError::KindMismatch(format!("expected boolean, got {other:?}"))),
        }
    }

    fn scalar(&self) -> Result<&AttributeValue, FunctionError> {
        match self {
            Evaluated::Scalar(v) => Ok(v),
            Evaluated::Bag(_) => Err(FunctionError::KindMismatch("expected a single value, got a bag".into())),
        }
    }

    fn bag(&self) -> Result<&[AttributeValue], FunctionError> {
        match self {
            Evaluated::Bag(b) => Ok(b),
            Evaluated::Scalar(_) => Err(FunctionError::KindMismatch("expected a bag, got a single value".into())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("expected exactly one value, bag has {0}")]
    NotSingleton(usize),
    #[error("wrong number of arguments: expected {expected}, got {found}")]
    Arity { expected: usize, found: usize },
}

type Implementation = Box<dyn Fn(&[Evaluated]) -> Result<Evaluated, FunctionError> + Send + Sync>;

pub struct FunctionDef {
    id: String,
    params: Vec<ParamType>,
    result: ParamType,
    implementation: Implementation,
}

impl fmt::Debug for FunctionDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionDef")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("result", &self.result)
            .finish()
    }
}

impl FunctionDef {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &[ParamType] {
        &self.params
    }

    pub fn result(&self) -> ParamType {
        self.result
    }

    /// Calls the function after checking arity and argument kinds.
    pub fn call(&self, args: &[Evaluated]) -> Result<Evaluated, FunctionError> {
        if args.len() != self.params.len() {
            return Err(FunctionError::Arity {
                expected: self.params.len(),
                found: args.len(),
            });
        }
        for (arg, param) in args.iter().zip(&self.params) {
            let ok = match (arg, param) {
                (Evaluated::Scalar(v), ParamType::Scalar(k)) => v.kind() == *k,
                (Evaluated::Bag(b), ParamType::Bag(k)) => b.iter().all(|v| v.kind() == *k),
                _ => false,
            };
            if !ok {
                return Err(FunctionError::KindMismatch(format!(
                    "{} expects {param}, got {arg:?}",
                    self.id
                )));
            }
        }
        (self.implementation)(args)
    }
}

/// Function id to definition.
#[derive(Debug, Default)]
pub struct FunctionRegistry {
    functions: BTreeMap<String, FunctionDef>,
}

pub const AND: &str = "fn:and";
pub const OR: &str = "fn:or";
pub const NOT: &str = "fn:not";
pub const GEO_DISTANCE: &str = "fn:geo-distance";
pub const GEO_WITHIN_DISTANCE: &str = "fn:geo-within-distance";
pub const TIME_WITHIN_WINDOW: &str = "fn:time-within-window";

const BAG_KINDS: [ValueKind; 7] = [
    ValueKind::String,
    ValueKind::Integer,
    ValueKind::Double,
    ValueKind::Boolean,
    ValueKind::DateTime,
    ValueKind::GeoPoint,
    ValueKind::Iri,
];

const ORDERED_KINDS: [ValueKind; 3] = [ValueKind::Integer, ValueKind::Double, ValueKind::DateTime];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    NotEqual,
    LessThan,
    LessOrEqual,
    GreaterThan,
    GreaterOrEqual,
}

impl Comparison {
    pub const ALL: [Comparison; 6] = [
        Comparison::Equal,
        Comparison::NotEqual,
        Comparison::LessThan,
        Comparison::LessOrEqual,
        Comparison::GreaterThan,
        Comparison::GreaterOrEqual,
    ];

    pub fn suffix(self) -> &'static str {
        match self {
            Comparison::Equal => "equal",
            Comparison::NotEqual => "not-equal",
            Comparison::LessThan => "less-than",
            Comparison::LessOrEqual => "less-than-or-equal",
            Comparison::GreaterThan => "greater-than",
            Comparison::GreaterOrEqual => "greater-than-or-equal",
        }
    }

    pub fn operator(self) -> &'static str {
        match self {
            Comparison::Equal => "==",
            Comparison::NotEqual => "!=",
            Comparison::LessThan => "<",
            Comparison::LessOrEqual => "<=",
            Comparison::GreaterThan => ">",
            Comparison::GreaterOrEqual => ">=",
        }
    }

    /// Function id of this comparison on `kind`.
    pub fn function_id(self, kind: ValueKind) -> String {
        format!("fn:{}-{}", kind.name(), self.suffix())
    }

    /// Inverse of [`Comparison::function_id`].
    pub fn parse_function_id(id: &str) -> Option<(Comparison, ValueKind)> {
        let rest = id.strip_prefix("fn:")?;
        ValueKind::ALL.into_iter().find_map(|kind| {
            let suffix = rest.strip_prefix(kind.name())?.strip_prefix('-')?;
            Comparison::ALL
                .into_iter()
                .find(|c| c.suffix() == suffix)
                .map(|c| (c, kind))
        })
    }

    fn apply(self, a: &AttributeValue, b: &AttributeValue) -> bool {
        use AttributeValue as V;
        let ord = match (a, b) {
            (V::Double(x), V::Double(y)) => match self {
                // IEEE semantics for doubles rather than the structural order.
                Comparison::Equal => return x == y,
                Comparison::NotEqual => return x != y,
                _ => match x.partial_cmp(y) {
                    Some(o) => o,
                    None => return false,
                },
            },
            _ => a.cmp(b),
        };
        match self {
            Comparison::Equal => ord.is_eq(),
            Comparison::NotEqual => ord.is_ne(),
            Comparison::LessThan => ord.is_lt(),
            Comparison::LessOrEqual => ord.is_le(),
            Comparison::GreaterThan => ord.is_gt(),
            Comparison::GreaterOrEqual => ord.is_ge(),
        }
    }
}

impl FunctionRegistry {
    /// The shared standard registry.
    pub fn standard() -> &'static FunctionRegistry {
        static REGISTRY: OnceLock<FunctionRegistry> = OnceLock::new();
        REGISTRY.get_or_init(FunctionRegistry::build_standard)
    }

    pub fn get(&self, id: &str) -> Option<&FunctionDef> {
        self.functions.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.functions.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    fn register(
        &mut self,
        id: impl Into<String>,
        params: Vec<ParamType>,
        result: ParamType,
        implementation: impl Fn(&[Evaluated]) -> Result<Evaluated, FunctionError> + Send + Sync + 'static,
    ) {
        let id = id.into();
        let def = FunctionDef {
            id: id.clone(),
            params,
            result,
            implementation: Box::new(implementation),
        };
        let previous = self.functions.insert(id, def);
        assert!(previous.is_none(), "function ids must be unique");
    }

    fn build_standard() -> FunctionRegistry {
        use ParamType::{Bag, Scalar};
        let mut r = FunctionRegistry::default();
        let boolean = ParamType::BOOLEAN;

        r.register(AND, vec![boolean, boolean], boolean, |a| {
            Ok(bool_value(a[0].as_bool()? && a[1].as_bool()?))
        });
        r.register(OR, vec![boolean, boolean], boolean, |a| {
            Ok(bool_value(a[0].as_bool()? || a[1].as_bool()?))
        });
        r.register(NOT, vec![boolean], boolean, |a| Ok(bool_value(!a[0].as_bool()?)));

        for kind in BAG_KINDS {
            let comparisons: &[Comparison] = if ORDERED_KINDS.contains(&kind) {
                &Comparison::ALL
            } else {
                &[Comparison::Equal, Comparison::NotEqual]
            };
            for &cmp in comparisons {
                r.register(
                    cmp.function_id(kind),
                    vec![Scalar(kind), Scalar(kind)],
                    boolean,
                    move |a| Ok(bool_value(cmp.apply(a[0].scalar()?, a[1].scalar()?))),
                );
            }
            r.register(
                format!("fn:{}-one-and-only", kind.name()),
                vec![Bag(kind)],
                Scalar(kind),
                |a| match a[0].bag()? {
                    [single] => Ok(Evaluated::Scalar(single.clone())),
                    bag => Err(FunctionError::NotSingleton(bag.len())),
                },
            );
            r.register(
                format!("fn:{}-bag-contains", kind.name()),
                vec![Bag(kind), Scalar(kind)],
                boolean,
                |a| Ok(bool_value(bag_contains(a[0].bag()?, a[1].scalar()?))),
            );
            r.register(
                format!("fn:{}-bag-size", kind.name()),
                vec![Bag(kind)],
                Scalar(ValueKind::Integer),
                |a| Ok(Evaluated::Scalar(AttributeValue::Integer(a[0].bag()?.len() as i64))),
            );
        }

        let point = Scalar(ValueKind::GeoPoint);
        r.register(GEO_DISTANCE, vec![point, point], Scalar(ValueKind::Double), |a| {
            let (p, q) = (geo(a[0].scalar()?)?, geo(a[1].scalar()?)?);
            Ok(Evaluated::Scalar(AttributeValue::Double(geo_distance(p, q))))
        });
        r.register(
            GEO_WITHIN_DISTANCE,
            vec![point, point, Scalar(ValueKind::Double)],
            boolean,
            |a| {
                let (p, q) = (geo(a[0].scalar()?)?, geo(a[1].scalar()?)?);
                let radius = match a[2].scalar()? {
                    AttributeValue::Double(d) => *d,
                    other => return Err(FunctionError::KindMismatch(format!("radius {other}"))),
                };
                Ok(bool_value(geo_within_distance(p, q, radius)?))
            },
        );
        let instant = Scalar(ValueKind::DateTime);
        r.register(
            TIME_WITHIN_WINDOW,
            vec![instant, instant, Scalar(ValueKind::Duration)],
            boolean,
            |a| match (a[0].scalar()?, a[1].scalar()?, a[2].scalar()?) {
                (AttributeValue::DateTime(t), AttributeValue::DateTime(c), AttributeValue::Duration(w)) => {
                    Ok(bool_value(time_within_window(t, c, *w)?))
                }
                _ => Err(FunctionError::KindMismatch("time-within-window".into())),
            },
        );
        r
    }
}

fn bool_value(b: bool) -> Evaluated {
    Evaluated::Scalar(AttributeValue::Boolean(b))
}

fn geo(v: &AttributeValue) -> Result<&GeoPoint, FunctionError> {
    match v {
        AttributeValue::GeoPoint(p) => Ok(p),
        other => Err(FunctionError::KindMismatch(format!("expected geoPoint, got {other}"))),
    }
}
