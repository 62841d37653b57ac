use serde::{Deserialize, Serialize};

use crate::model::{BaseKind, ResolvedSchema};

use super::value::{RecordValue, Value};

/// A value-level rule violation. Violations are data, not errors: a record
/// can be decoded and inspected even when its values are out of contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub rule: String,
    pub message: String,
}

/// Checks a structurally conforming record against the schema's value
/// rules: `@Validate` regexes, enum ranges, and finiteness of unit-bearing
/// measurements.
pub fn validate_value(record: &RecordValue, schema: &ResolvedSchema) -> Vec<Violation> {
    let mut out = Vec::new();
    walk_record(record, schema, &schema.root.clone(), &mut out);
    out
}

fn walk_record(record: &RecordValue, schema: &ResolvedSchema, path: &str, out: &mut Vec<Violation>) {
    let Some(composite) = schema.composite(&record.type_fqn) else { return };
    for (id, value) in &record.fields {
        let Some(field) = composite.field(*id) else { continue };
        let field_path = format!("{path}.{}", field.name);

        if let (Some(pattern), Value::Text(text)) = (schema.effective_validation(field), value) {
            if let Ok(re) = regex::Regex::new(pattern) {
                if !re.is_match(text) {
                    out.push(Violation {
                        path: field_path.clone(),
                        rule: format!("regex /{pattern}/"),
                        message: format!("value {text:?} does not match"),
                    });
                }
            }
        }
        if schema.effective_unit(field).is_some() {
            if let Value::Double(d) = value {
                if !d.is_finite() {
                    out.push(Violation {
                        path: field_path.clone(),
                        rule: "finite-measurement".into(),
                        message: format!("unit-bearing value is {d}"),
                    });
                }
            }
        }
        walk_value(value, &schema.base_kind(&field.ty), schema, &field_path, out);
    }
}

fn walk_value(
    value: &Value,
    kind: &BaseKind,
    schema: &ResolvedSchema,
    path: &str,
    out: &mut Vec<Violation>,
) {
    match (kind, value) {
        (BaseKind::Enum(fqn), Value::Enum { value: n, .. }) => {
            if let Some(decl) = schema.enum_def(fqn) {
                if decl.name_of(*n).is_none() {
                    out.push(Violation {
                        path: path.to_string(),
                        rule: format!("enum {fqn}"),
                        message: format!("{n} is not a declared value"),
                    });
                }
            }
        }
        (BaseKind::Record(_), Value::Record(nested)) => walk_record(nested, schema, path, out),
        (BaseKind::List(elem), Value::List(items)) => {
            for (i, item) in items.iter().enumerate() {
                walk_value(item, elem, schema, &format!("{path}[{i}]"), out);
            }
        }
        (BaseKind::Map(k, v), Value::Map(entries)) => {
            for (i, (key, val)) in entries.iter().enumerate() {
                walk_value(key, k, schema, &format!("{path}<key {i}>"), out);
                walk_value(val, v, schema, &format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}
