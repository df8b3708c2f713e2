use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

use super::OntologyError;

/// WGS84 coordinate in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, OntologyError> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(OntologyError::InvalidLiteral(format!(
                "geoPoint ({lat}, {lon}) out of range"
            )));
        }
        Ok(GeoPoint { lat, lon })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    fn key(&self) -> (u64, u64) {
        (self.lat.to_bits(), self.lon.to_bits())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LiteralKind {
    String,
    Integer,
    Double,
    Boolean,
    DateTime,
    GeoPoint,
}

impl LiteralKind {
    pub fn name(self) -> &'static str {
        match self {
            LiteralKind::String => "string",
            LiteralKind::Integer => "integer",
            LiteralKind::Double => "double",
            LiteralKind::Boolean => "boolean",
            LiteralKind::DateTime => "dateTime",
            LiteralKind::GeoPoint => "geoPoint",
        }
    }

    /// Kinds that support `<`, `<=`, `>` and `>=`.
    pub fn is_ordered(self) -> bool {
        matches!(self, LiteralKind::Integer | LiteralKind::Double | LiteralKind::DateTime)
    }
}

impl FromStr for LiteralKind {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "string" => LiteralKind::String,
            "integer" => LiteralKind::Integer,
            "double" => LiteralKind::Double,
            "boolean" => LiteralKind::Boolean,
            "dateTime" => LiteralKind::DateTime,
            "geoPoint" => LiteralKind::GeoPoint,
            other => return Err(OntologyError::InvalidLiteral(format!("unknown kind `{other}`"))),
        })
    }
}

impl fmt::Display for LiteralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A typed data value. Doubles compare by total order so literals can live in
/// ordered sets.
#[derive(Clone, Debug)]
pub enum Literal {
    String(String),
    Integer(i64),
    Double(f64),
    Boolean(bool),
    DateTime(DateTime<Utc>),
    GeoPoint(GeoPoint),
}

impl Literal {
    pub fn kind(&self) -> LiteralKind {
        match self {
            Literal::String(_) => LiteralKind::String,
            Literal::Integer(_) => LiteralKind::Integer,
            Literal::Double(_) => LiteralKind::Double,
            Literal::Boolean(_) => LiteralKind::Boolean,
            Literal::DateTime(_) => LiteralKind::DateTime,
            Literal::GeoPoint(_) => LiteralKind::GeoPoint,
        }
    }

    /// Normalizes to UTC with millisecond precision.
    pub fn date_time(value: DateTime<Utc>) -> Literal {
        Literal::DateTime(value.trunc_subsecs(3))
    }

    /// Parses an RFC 3339 timestamp. An explicit offset is required.
    pub fn parse_date_time(text: &str) -> Result<Literal, OntologyError> {
        DateTime::parse_from_rfc3339(text)
            .map(|dt| Literal::date_time(dt.with_timezone(&Utc)))
            .map_err(|e| OntologyError::InvalidLiteral(format!("dateTime `{text}`: {e}")))
    }

    /// Builds a literal of `kind` from its JSON encoding.
    pub fn from_json(kind: LiteralKind, value: &serde_json::Value) -> Result<Literal, OntologyError> {
        use serde_json::Value as J;
        let bad = || OntologyError::InvalidLiteral(format!("value {value} is not a valid {kind}"));
        Ok(match (kind, value) {
            (LiteralKind::String, J::String(s)) => Literal::String(s.clone()),
            (LiteralKind::Integer, J::Number(n)) => Literal::Integer(n.as_i64().ok_or_else(bad)?),
            (LiteralKind::Double, J::Number(n)) => Literal::Double(n.as_f64().ok_or_else(bad)?),
            (LiteralKind::Boolean, J::Bool(b)) => Literal::Boolean(*b),
            (LiteralKind::DateTime, J::String(s)) => Literal::parse_date_time(s)?,
            (LiteralKind::GeoPoint, J::Object(map)) => {
                let lat = map.get("lat").and_then(J::as_f64).ok_or_else(bad)?;
                let lon = map.get("lon").and_then(J::as_f64).ok_or_else(bad)?;
                if map.len() != 2 {
                    return Err(bad());
                }
                Literal::GeoPoint(GeoPoint::new(lat, lon)?)
            }
            _ => return Err(bad()),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            Literal::String(s) => json!(s),
            Literal::Integer(i) => json!(i),
            Literal::Double(d) => json!(d),
            Literal::Boolean(b) => json!(b),
            Literal::DateTime(dt) => json!(format_date_time(dt)),
            Literal::GeoPoint(p) => json!({ "lat": p.lat, "lon": p.lon }),
        }
    }

    /// Ordering within one kind; `None` across kinds or for unordered kinds.
    pub fn partial_compare(&self, other: &Literal) -> Option<Ordering> {
        match (self, other) {
            (Literal::Integer(a), Literal::Integer(b)) => Some(a.cmp(b)),
            (Literal::Double(a), Literal::Double(b)) => a.partial_cmp(b),
            (Literal::DateTime(a), Literal::DateTime(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    fn discriminant(&self) -> u8 {
        self.kind() as u8
    }
}

pub fn format_date_time(dt: &DateTime<Utc>) -> String {
    dt.to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Literal {}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Literal::String(a), Literal::String(b)) => a.cmp(b),
            (Literal::Integer(a), Literal::Integer(b)) => a.cmp(b),
            (Literal::Double(a), Literal::Double(b)) => a.total_cmp(b),
            (Literal::Boolean(a), Literal::Boolean(b)) => a.cmp(b),
            (Literal::DateTime(a), Literal::DateTime(b)) => a.cmp(b),
            (Literal::GeoPoint(a), Literal::GeoPoint(b)) => {
                a.lat.total_cmp(&b.lat).then_with(|| a.lon.total_cmp(&b.lon))
            }
            _ => self.discriminant().cmp(&other.discriminant()),
        }
    }
}

impl Hash for Literal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.discriminant().hash(state);
        match self {
            Literal::String(s) => s.hash(state),
            Literal::Integer(i) => i.hash(state),
            Literal::Double(d) => d.to_bits().hash(state),
            Literal::Boolean(b) => b.hash(state),
            Literal::DateTime(dt) => dt.hash(state),
            Literal::GeoPoint(p) => p.key().hash(state),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::String(s) => write!(f, "{s:?}"),
            Literal::Integer(i) => write!(f, "{i}"),
            Literal::Double(d) => write!(f, "{d:?}"),
            Literal::Boolean(b) => write!(f, "{b}"),
            Literal::DateTime(dt) => f.write_str(&format_date_time(dt)),
            Literal::GeoPoint(p) => write!(f, "point({:?}, {:?})", p.lat, p.lon),
        }
    }
}
