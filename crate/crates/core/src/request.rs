//! Request contexts: attribute values per category, as sent by an
//! enforcement point.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::ontology::{Iri, Literal, LiteralKind, PrefixTable};
use crate::policy::{AttributeValue, Category, ValueKind};
use crate::vocab::{CLASS_ID, REQUEST_CLASS_ID, RESOURCE_ID};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RequestError {
    #[error("request is not valid JSON: {0}")]
    Syntax(String),
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error("malformed request: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequestAttribute {
    pub id: Iri,
    pub value: AttributeValue,
}

/// Attribute values grouped by category, in document order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RequestContext {
    categories: BTreeMap<Category, Vec<RequestAttribute>>,
}

fn iri(s: &str) -> Iri {
    Iri::new(s).expect("vocabulary constants are absolute")
}

impl RequestContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one attribute value.
    pub fn with(mut self, category: Category, id: Iri, value: AttributeValue) -> Self {
        self.push(category, id, value);
        self
    }

    pub fn push(&mut self, category: Category, id: Iri, value: AttributeValue) {
        self.categories
            .entry(category)
            .or_default()
            .push(RequestAttribute { id, value });
    }

    pub fn is_empty(&self) -> bool {
        self.categories.values().all(Vec::is_empty)
    }

    /// Categories carrying at least one attribute.
    pub fn categories(&self) -> impl Iterator<Item = Category> + '_ {
        self.categories
            .iter()
            .filter(|(_, attrs)| !attrs.is_empty())
            .map(|(c, _)| *c)
    }

    pub fn attributes(&self, category: Category) -> &[RequestAttribute] {
        self.categories.get(&category).map_or(&[], Vec::as_slice)
    }

    /// All values of `id` in `category`, of any kind.
    pub fn values(&self, category: Category, id: &Iri) -> Vec<&AttributeValue> {
        self.attributes(category)
            .iter()
            .filter(|a| a.id == *id)
            .map(|a| &a.value)
            .collect()
    }

    fn iri_values(&self, category: Category, id: &str) -> Vec<&AttributeValue> {
        self.values(category, &iri(id))
    }

    /// The class a class-targeted request asks about.
    pub fn resource_class(&self) -> Option<&Iri> {
        self.iri_values(Category::Resource, CLASS_ID)
            .into_iter()
            .find_map(|v| match v {
                AttributeValue::Iri(i) => Some(i),
                _ => None,
            })
    }

    /// The concrete resource, when the request names one.
    pub fn resource_id(&self) -> Option<&Iri> {
        self.iri_values(Category::Resource, RESOURCE_ID)
            .into_iter()
            .find_map(|v| match v {
                AttributeValue::Iri(i) => Some(i),
                _ => None,
            })
    }

    /// A copy targeting the concrete `resource` instead of a resource class.
    pub fn for_resource(&self, resource: &Iri) -> RequestContext {
        let class_id = iri(CLASS_ID);
        let resource_id = iri(RESOURCE_ID);
        let mut out = self.clone();
        let attrs = out.categories.entry(Category::Resource).or_default();
        attrs.retain(|a| a.id != class_id && a.id != resource_id);
        attrs.insert(
            0,
            RequestAttribute {
                id: resource_id,
                value: AttributeValue::Iri(resource.clone()),
            },
        );
        out
    }

    /// Structural checks that JSON decoding alone does not enforce.
    pub fn validate(&self) -> Result<(), RequestError> {
        let malformed = |m: String| Err(RequestError::Malformed(m));
        for (category, attrs) in &self.categories {
            let mut class_ids = 0;
            let mut resource_ids = 0;
            for a in attrs {
                match a.id.as_str() {
                    REQUEST_CLASS_ID => {
                        return malformed(format!(
                            "{REQUEST_CLASS_ID} is derived by the decision point and cannot be supplied"
                        ))
                    }
                    CLASS_ID => class_ids += 1,
                    RESOURCE_ID if *category != Category::Resource => {
                        return malformed(format!("{RESOURCE_ID} is only valid in the resource category"))
                    }
                    RESOURCE_ID => resource_ids += 1,
                    _ => continue,
                }
                if a.value.kind() != ValueKind::Iri {
                    return malformed(format!("{} must be iri-valued", a.id));
                }
            }
            if class_ids > 1 {
                return malformed(format!("{category} has more than one {CLASS_ID}"));
            }
            if resource_ids > 1 {
                return malformed("more than one resource id".into());
            }
            if class_ids == 1 && resource_ids == 1 {
                return malformed("the resource is given both as a class and as a concrete resource".into());
            }
        }
        Ok(())
    }

    /// Decodes a request document. Attribute ids and iri values may use the
    /// built-in prefixes.
    pub fn from_json(bytes: &[u8]) -> Result<RequestContext, RequestError> {
        let doc: Json = serde_json::from_slice(bytes).map_err(|e| RequestError::Syntax(e.to_string()))?;
        Self::from_json_value(&doc)
    }

    pub fn from_json_value(doc: &Json) -> Result<RequestContext, RequestError> {
        let invalid = |location: String, message: String| RequestError::Invalid { location, message };
        let Json::Object(map) = doc else {
            return Err(invalid("request".into(), "expected a JSON object".into()));
        };
        let prefixes = PrefixTable::builtin();
        let mut ctx = RequestContext::new();
        for (key, entries) in map {
            let category: Category = key
                .parse()
                .map_err(|_| invalid(key.clone(), "unknown category".into()))?;
            let Json::Array(entries) = entries else {
                return Err(invalid(key.clone(), "expected an array of attributes".into()));
            };
            for (i, entry) in entries.iter().enumerate() {
                let location = format!("{key}[{i}]");
                let attribute = decode_attribute(entry, &prefixes).map_err(|m| invalid(location, m))?;
                ctx.push(category, attribute.id, attribute.value);
            }
        }
        Ok(ctx)
    }

    pub fn to_json(&self) -> Json {
        let mut out = Map::new();
        for (category, attrs) in &self.categories {
            let entries: Vec<Json> = attrs
                .iter()
                .map(|a| {
                    json!({
                        "id": a.id.as_str(),
                        "kind": a.value.kind().name(),
                        "value": value_to_json(&a.value),
                    })
                })
                .collect();
            out.insert(category.name().to_string(), Json::Array(entries));
        }
        Json::Object(out)
    }
}

fn decode_attribute(entry: &Json, prefixes: &PrefixTable) -> Result<RequestAttribute, String> {
    let Json::Object(fields) = entry else {
        return Err("expected an object with id, kind and value".into());
    };
    if let Some(extra) = fields.keys().find(|k| !matches!(k.as_str(), "id" | "kind" | "value")) {
        return Err(format!("unknown field `{extra}`"));
    }
    let text = |name: &str| -> Result<&str, String> {
        fields
            .get(name)
            .and_then(Json::as_str)
            .ok_or_else(|| format!("`{name}` must be a string"))
    };
    let id = prefixes.resolve(text("id")?).map_err(|e| e.to_string())?;
    let kind: ValueKind = text("kind")?.parse()?;
    let value = fields.get("value").ok_or("missing `value`")?;
    Ok(RequestAttribute {
        id,
        value: value_from_json(kind, value, prefixes)?,
    })
}

pub(crate) fn literal_kind(kind: ValueKind) -> Option<LiteralKind> {
    Some(match kind {
        ValueKind::String => LiteralKind::String,
        ValueKind::Integer => LiteralKind::Integer,
        ValueKind::Double => LiteralKind::Double,
        ValueKind::Boolean => LiteralKind::Boolean,
        ValueKind::DateTime => LiteralKind::DateTime,
        ValueKind::GeoPoint => LiteralKind::GeoPoint,
        ValueKind::Iri | ValueKind::Duration => return None,
    })
}

/// Decodes one value of `kind`; iris may be prefixed names.
pub fn value_from_json(kind: ValueKind, value: &Json, prefixes: &PrefixTable) -> Result<AttributeValue, String> {
    match kind {
        ValueKind::Iri => {
            let s = value.as_str().ok_or("iri values must be strings")?;
            prefixes.resolve(s).map(AttributeValue::Iri).map_err(|e| e.to_string())
        }
        ValueKind::Duration => Err("duration is not an attribute kind".into()),
        other => {
            let lk = literal_kind(other).expect("attribute kinds are literal kinds");
            Literal::from_json(lk, value)
                .map(AttributeValue::from_literal)
                .map_err(|e| e.to_string())
        }
    }
}

pub fn value_to_json(value: &AttributeValue) -> Json {
    match value.to_ontology() {
        Some(crate::ontology::Value::Literal(l)) => l.to_json(),
        Some(crate::ontology::Value::Iri(i)) => json!(i.as_str()),
        None => json!(value.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UC1: &str = r#"{
        "subject": [{"id": "aco:classId", "kind": "iri", "value": "org:HealthCentre"}],
        "resource": [{"id": "aco:classId", "kind": "iri", "value": "fit:TrainingMetric"}],
        "action": [{"id": "aco:classId", "kind": "iri", "value": "aco:Read"}]
    }"#;

    #[test]
    fn decodes_and_reencodes() {
        let ctx = RequestContext::from_json(UC1.as_bytes()).unwrap();
        assert_eq!(ctx.categories().count(), 3);
        assert_eq!(
            ctx.resource_class().unwrap().as_str(),
            "http://sxacml.example.org/ns/fitness#TrainingMetric"
        );
        assert!(ctx.resource_id().is_none());
        ctx.validate().unwrap();
        let again = RequestContext::from_json_value(&ctx.to_json()).unwrap();
        assert_eq!(again, ctx);
    }

    #[test]
    fn typed_values() {
        let ctx = RequestContext::from_json(
            br#"{"environment": [
                {"id": "aco:eventLocation", "kind": "geoPoint", "value": {"lat": 52.2297, "lon": 21.0122}},
                {"id": "aco:eventTime", "kind": "dateTime", "value": "2019-06-14T23:00:00Z"},
                {"id": "<urn:x:n>", "kind": "integer", "value": 3}
            ]}"#,
        )
        .unwrap();
        let kinds: Vec<_> = ctx
            .attributes(Category::Environment)
            .iter()
            .map(|a| a.value.kind())
            .collect();
        assert_eq!(kinds, [ValueKind::GeoPoint, ValueKind::DateTime, ValueKind::Integer]);
        assert_eq!(RequestContext::from_json_value(&ctx.to_json()).unwrap(), ctx);
    }

    #[test]
    fn rejects_bad_documents() {
        for bad in [
            "",
            "[]",
            r#"{"owner": []}"#,
            r#"{"subject": {}}"#,
            r#"{"subject": [{"id": "aco:x", "kind": "integer", "value": "3"}]}"#,
            r#"{"subject": [{"id": "bare", "kind": "string", "value": "3"}]}"#,
            r#"{"subject": [{"id": "aco:x", "kind": "duration", "value": "PT1H"}]}"#,
            r#"{"subject": [{"id": "aco:x", "kind": "string", "value": "3", "extra": 1}]}"#,
        ] {
            assert!(RequestContext::from_json(bad.as_bytes()).is_err(), "{bad}");
        }
    }

    #[test]
    fn validation() {
        let class = iri(CLASS_ID);
        let rid = iri(RESOURCE_ID);
        let v = |s: &str| AttributeValue::Iri(iri(s));
        let both = RequestContext::new()
            .with(Category::Resource, class.clone(), v("urn:c:A"))
            .with(Category::Resource, rid.clone(), v("urn:i:1"));
        assert!(matches!(both.validate(), Err(RequestError::Malformed(_))));
        let two = RequestContext::new()
            .with(Category::Subject, class.clone(), v("urn:c:A"))
            .with(Category::Subject, class.clone(), v("urn:c:B"));
        assert!(two.validate().is_err());
        let forged = RequestContext::new().with(Category::Subject, iri(REQUEST_CLASS_ID), v("urn:c:A"));
        assert!(forged.validate().is_err());
        let one = RequestContext::new().with(Category::Resource, class, v("urn:c:A"));
        let concrete = one.for_resource(&iri("urn:i:1"));
        concrete.validate().unwrap();
        assert_eq!(concrete.resource_id().unwrap().as_str(), "urn:i:1");
        assert!(concrete.resource_class().is_none());
    }
}
