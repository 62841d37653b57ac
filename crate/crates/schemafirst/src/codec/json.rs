//! Schema-guided translation between wire values and the JSON record form
//! used by the CLI and dataset files: field names as keys, bytes as
//! lowercase hex, enums as their symbolic names.

use serde_json::{json, Map, Value as Json};

use crate::model::{BaseKind, ResolvedSchema};

use super::encode::EncodeError;
use super::value::{RecordValue, Value};

/// Renders a decoded record as a JSON object keyed by field names, in the
/// schema's field order.
pub fn record_to_json(record: &RecordValue, schema: &ResolvedSchema) -> Json {
    let Some(composite) = schema.composite(&record.type_fqn) else {
        return Json::Null;
    };
    let mut out = Map::new();
    for field in &composite.fields {
        if let Some(value) = record.get(field.id) {
            out.insert(field.name.clone(), value_to_json(value, schema));
        }
    }
    Json::Object(out)
}

fn value_to_json(value: &Value, schema: &ResolvedSchema) -> Json {
    match value {
        Value::Bool(b) => json!(b),
        Value::I32(n) => json!(n),
        Value::I64(n) => json!(n),
        Value::Double(d) => json!(d),
        Value::Text(s) => json!(s),
        Value::Bytes(b) => json!(hex::encode(b)),
        Value::Enum { fqn, value } => match schema.enum_def(fqn).and_then(|e| e.name_of(*value)) {
            Some(name) => json!(name),
            None => json!(value),
        },
        Value::List(items) => {
            Json::Array(items.iter().map(|v| value_to_json(v, schema)).collect())
        }
        Value::Map(entries) => {
            // String-keyed maps render as objects; anything else as pairs.
            if entries.iter().all(|(k, _)| matches!(k, Value::Text(_))) {
                let mut obj = Map::new();
                for (k, v) in entries {
                    let Value::Text(key) = k else { unreachable!() };
                    obj.insert(key.clone(), value_to_json(v, schema));
                }
                Json::Object(obj)
            } else {
                Json::Array(
                    entries
                        .iter()
                        .map(|(k, v)| json!([value_to_json(k, schema), value_to_json(v, schema)]))
                        .collect(),
                )
            }
        }
        Value::Record(nested) => record_to_json(nested, schema),
    }
}

/// Builds a typed record from a name-keyed JSON object.
pub fn record_from_json(
    json: &Map<String, Json>,
    schema: &ResolvedSchema,
    type_fqn: &str,
) -> Result<RecordValue, EncodeError> {
    let composite = schema.composite(type_fqn).ok_or_else(|| EncodeError::TypeMismatch {
        path: type_fqn.to_string(),
        message: format!("'{type_fqn}' is not a struct in the schema"),
    })?;
    let mut record = RecordValue::new(type_fqn);
    for (key, raw) in json {
        let field = composite.field_named(key).ok_or_else(|| EncodeError::UnknownField {
            path: type_fqn.to_string(),
            field: key.clone(),
        })?;
        let path = format!("{type_fqn}.{key}");
        let value = value_from_json(raw, &schema.base_kind(&field.ty), schema, &path)?;
        record.fields.push((field.id, value));
    }
    Ok(record)
}

fn value_from_json(
    raw: &Json,
    kind: &BaseKind,
    schema: &ResolvedSchema,
    path: &str,
) -> Result<Value, EncodeError> {
    let mismatch =
        |msg: &str| EncodeError::TypeMismatch { path: path.to_string(), message: msg.into() };
    Ok(match kind {
        BaseKind::Bool => Value::Bool(raw.as_bool().ok_or_else(|| mismatch("expected bool"))?),
        BaseKind::I32 => {
            let n = raw.as_i64().ok_or_else(|| mismatch("expected integer"))?;
            Value::I32(i32::try_from(n).map_err(|_| mismatch("integer out of i32 range"))?)
        }
        BaseKind::I64 => Value::I64(raw.as_i64().ok_or_else(|| mismatch("expected integer"))?),
        BaseKind::Double => {
            Value::Double(raw.as_f64().ok_or_else(|| mismatch("expected number"))?)
        }
        BaseKind::Text => {
            Value::Text(raw.as_str().ok_or_else(|| mismatch("expected string"))?.to_string())
        }
        BaseKind::Binary => {
            let s = raw.as_str().ok_or_else(|| mismatch("expected hex string"))?;
            Value::Bytes(hex::decode(s).map_err(|_| mismatch("expected lowercase hex"))?)
        }
        BaseKind::Enum(fqn) => {
            let decl = schema
                .enum_def(fqn)
                .ok_or_else(|| mismatch(&format!("enum {fqn} is not in the schema")))?;
            let value = match raw {
                Json::String(name) => decl
                    .value_of(name)
                    .ok_or_else(|| mismatch(&format!("'{name}' is not a value of {fqn}")))?,
                Json::Number(n) => {
                    let n = n.as_i64().ok_or_else(|| mismatch("expected integer"))?;
                    i32::try_from(n).map_err(|_| mismatch("enum value out of range"))?
                }
                _ => return Err(mismatch("expected enum name or number")),
            };
            Value::Enum { fqn: fqn.clone(), value }
        }
        BaseKind::Record(fqn) => {
            let obj = raw.as_object().ok_or_else(|| mismatch("expected object"))?;
            Value::Record(record_from_json(obj, schema, fqn)?)
        }
        BaseKind::List(elem) => {
            let arr = raw.as_array().ok_or_else(|| mismatch("expected array"))?;
            let mut items = Vec::with_capacity(arr.len());
            for (i, item) in arr.iter().enumerate() {
                items.push(value_from_json(item, elem, schema, &format!("{path}[{i}]"))?);
            }
            Value::List(items)
        }
        BaseKind::Map(k, v) => {
            let mut entries = Vec::new();
            match raw {
                Json::Object(obj) if matches!(**k, BaseKind::Text) => {
                    for (key, val) in obj {
                        entries.push((
                            Value::Text(key.clone()),
                            value_from_json(val, v, schema, &format!("{path}.{key}"))?,
                        ));
                    }
                }
                Json::Array(pairs) => {
                    for (i, pair) in pairs.iter().enumerate() {
                        let pair = pair.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                            mismatch("expected [key, value] pairs")
                        })?;
                        entries.push((
                            value_from_json(&pair[0], k, schema, &format!("{path}<key {i}>"))?,
                            value_from_json(&pair[1], v, schema, &format!("{path}[{i}]"))?,
                        ));
                    }
                }
                _ => return Err(mismatch("expected object or pair array")),
            }
            Value::Map(entries)
        }
    })
}
