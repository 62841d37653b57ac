use thiserror::Error;

use crate::model::{BaseKind, CompositeDef, FieldDef, ResolvedSchema};

use super::value::{RecordValue, Value};
use super::varint::{write_uleb, zigzag32, zigzag64};
use super::{wire, FORMAT_VERSION, MAGIC};

#[derive(Debug, Clone, Error)]
pub enum EncodeError {
    #[error("type mismatch at {path}: {message}")]
    TypeMismatch { path: String, message: String },
    #[error("missing required field '{field}' in {path}")]
    MissingRequiredField { path: String, field: String },
    #[error("validation failure at {path}: {message}")]
    ValidationFailure { path: String, message: String },
    #[error("no field named '{field}' in {path}")]
    UnknownField { path: String, field: String },
}

impl EncodeError {
    pub(crate) fn mismatch(path: &str, message: impl Into<String>) -> Self {
        Self::TypeMismatch { path: path.to_string(), message: message.into() }
    }
}

/// Encodes a conforming record into a self-describing payload.
///
/// Canonical: fields are written in ascending id order regardless of their
/// order in the record, so two logically equal records encode to identical
/// bytes. Non-optional fields must be present; typed values must match the
/// schema; `@Validate` rules and enum ranges are enforced.
pub fn encode(
    record: &RecordValue,
    schema: &ResolvedSchema,
    version: u32,
) -> Result<Vec<u8>, EncodeError> {
    if record.type_fqn != schema.root {
        return Err(EncodeError::mismatch(
            &schema.root,
            format!("record is a {}, schema root is {}", record.type_fqn, schema.root),
        ));
    }
    let root = schema.root_composite();
    let body = encode_record_body(record, root, schema, &schema.root)?;

    let mut out = Vec::with_capacity(body.len() + schema.root.len() + 8);
    out.extend_from_slice(&MAGIC);
    out.push(FORMAT_VERSION);
    write_uleb(&mut out, schema.root.len() as u64);
    out.extend_from_slice(schema.root.as_bytes());
    write_uleb(&mut out, u64::from(version));
    out.extend_from_slice(&body);
    Ok(out)
}

fn encode_record_body(
    record: &RecordValue,
    composite: &CompositeDef,
    schema: &ResolvedSchema,
    path: &str,
) -> Result<Vec<u8>, EncodeError> {
    let mut sorted: Vec<&(i32, Value)> = record.fields.iter().collect();
    sorted.sort_by_key(|(id, _)| *id);
    for pair in sorted.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(EncodeError::mismatch(path, format!("duplicate field id {}", pair[0].0)));
        }
    }
    for field in &composite.fields {
        if !field.optional && record.get(field.id).is_none() {
            return Err(EncodeError::MissingRequiredField {
                path: path.to_string(),
                field: field.name.clone(),
            });
        }
    }

    let mut body = Vec::new();
    for (id, value) in sorted {
        let field = composite.field(*id).ok_or_else(|| {
            EncodeError::mismatch(path, format!("field id {id} is not declared by {}", composite.fqn))
        })?;
        let field_path = format!("{path}.{}", field.name);
        check_validation(schema, field, value, &field_path)?;
        let kind = schema.base_kind(&field.ty);
        body.push_uleb(*id as u64);
        body.push(wire_type_of(&kind));
        encode_value(value, &kind, schema, &field_path, &mut body)?;
    }
    Ok(body)
}

fn check_validation(
    schema: &ResolvedSchema,
    field: &FieldDef,
    value: &Value,
    path: &str,
) -> Result<(), EncodeError> {
    if let (Some(pattern), Value::Text(text)) = (schema.effective_validation(field), value) {
        let re = regex::Regex::new(pattern)
            .map_err(|e| EncodeError::mismatch(path, format!("bad validation regex: {e}")))?;
        if !re.is_match(text) {
            return Err(EncodeError::ValidationFailure {
                path: path.to_string(),
                message: format!("value {text:?} does not match /{pattern}/"),
            });
        }
    }
    Ok(())
}

fn encode_value(
    value: &Value,
    kind: &BaseKind,
    schema: &ResolvedSchema,
    path: &str,
    out: &mut Vec<u8>,
) -> Result<(), EncodeError> {
    match (kind, value) {
        (BaseKind::Bool, Value::Bool(b)) => out.push(u8::from(*b)),
        (BaseKind::I32, Value::I32(n)) => out.push_uleb(u64::from(zigzag32(*n))),
        (BaseKind::I64, Value::I64(n)) => out.push_uleb(zigzag64(*n)),
        (BaseKind::Double, Value::Double(d)) => out.extend_from_slice(&d.to_le_bytes()),
        (BaseKind::Text, Value::Text(s)) => {
            out.push_uleb(s.len() as u64);
            out.extend_from_slice(s.as_bytes());
        }
        (BaseKind::Binary, Value::Bytes(b)) => {
            out.push_uleb(b.len() as u64);
            out.extend_from_slice(b);
        }
        (BaseKind::Enum(fqn), Value::Enum { fqn: vfqn, value: n }) => {
            if fqn != vfqn {
                return Err(EncodeError::mismatch(path, format!("expected {fqn}, got {vfqn}")));
            }
            let decl = schema.enum_def(fqn).ok_or_else(|| {
                EncodeError::mismatch(path, format!("enum {fqn} is not in the schema"))
            })?;
            if decl.name_of(*n).is_none() {
                return Err(EncodeError::ValidationFailure {
                    path: path.to_string(),
                    message: format!("{n} is not a declared value of {fqn}"),
                });
            }
            out.push_uleb(u64::from(zigzag32(*n)));
        }
        (BaseKind::Record(fqn), Value::Record(nested)) => {
            if &nested.type_fqn != fqn {
                return Err(EncodeError::mismatch(
                    path,
                    format!("expected {fqn}, got {}", nested.type_fqn),
                ));
            }
            let composite = schema.composite(fqn).ok_or_else(|| {
                EncodeError::mismatch(path, format!("struct {fqn} is not in the schema"))
            })?;
            let body = encode_record_body(nested, composite, schema, path)?;
            out.push_uleb(body.len() as u64);
            out.extend_from_slice(&body);
        }
        (BaseKind::List(elem), Value::List(items)) => {
            out.push(wire_type_of(elem));
            out.push_uleb(items.len() as u64);
            for (i, item) in items.iter().enumerate() {
                encode_value(item, elem, schema, &format!("{path}[{i}]"), out)?;
            }
        }
        (BaseKind::Map(k, v), Value::Map(entries)) => {
            out.push(wire_type_of(k));
            out.push(wire_type_of(v));
            out.push_uleb(entries.len() as u64);
            for (i, (key, val)) in entries.iter().enumerate() {
                encode_value(key, k, schema, &format!("{path}<key {i}>"), out)?;
                encode_value(val, v, schema, &format!("{path}[{i}]"), out)?;
            }
        }
        (expected, got) => {
            return Err(EncodeError::mismatch(
                path,
                format!("expected {expected}, got {}", got.kind_name()),
            ))
        }
    }
    Ok(())
}

/// Checks a value against a resolved type without encoding it: structural
/// shape, nested-record completeness, and enum ranges. Used by record
/// builders to reject bad values at staging time.
pub fn check_value(
    value: &Value,
    kind: &BaseKind,
    schema: &ResolvedSchema,
    path: &str,
) -> Result<(), EncodeError> {
    match (kind, value) {
        (BaseKind::Bool, Value::Bool(_))
        | (BaseKind::I32, Value::I32(_))
        | (BaseKind::I64, Value::I64(_))
        | (BaseKind::Double, Value::Double(_))
        | (BaseKind::Text, Value::Text(_))
        | (BaseKind::Binary, Value::Bytes(_)) => Ok(()),
        (BaseKind::Enum(fqn), Value::Enum { fqn: vfqn, value: n }) => {
            if fqn != vfqn {
                return Err(EncodeError::mismatch(path, format!("expected {fqn}, got {vfqn}")));
            }
            let decl = schema.enum_def(fqn).ok_or_else(|| {
                EncodeError::mismatch(path, format!("enum {fqn} is not in the schema"))
            })?;
            if decl.name_of(*n).is_none() {
                return Err(EncodeError::ValidationFailure {
                    path: path.to_string(),
                    message: format!("{n} is not a declared value of {fqn}"),
                });
            }
            Ok(())
        }
        (BaseKind::Record(fqn), Value::Record(nested)) => {
            if &nested.type_fqn != fqn {
                return Err(EncodeError::mismatch(
                    path,
                    format!("expected {fqn}, got {}", nested.type_fqn),
                ));
            }
            let composite = schema.composite(fqn).ok_or_else(|| {
                EncodeError::mismatch(path, format!("struct {fqn} is not in the schema"))
            })?;
            for field in &composite.fields {
                if !field.optional && nested.get(field.id).is_none() {
                    return Err(EncodeError::MissingRequiredField {
                        path: path.to_string(),
                        field: field.name.clone(),
                    });
                }
            }
            for (id, inner) in &nested.fields {
                let field = composite.field(*id).ok_or_else(|| {
                    EncodeError::mismatch(path, format!("field id {id} is not declared by {fqn}"))
                })?;
                check_value(
                    inner,
                    &schema.base_kind(&field.ty),
                    schema,
                    &format!("{path}.{}", field.name),
                )?;
            }
            Ok(())
        }
        (BaseKind::List(elem), Value::List(items)) => {
            for (i, item) in items.iter().enumerate() {
                check_value(item, elem, schema, &format!("{path}[{i}]"))?;
            }
            Ok(())
        }
        (BaseKind::Map(k, v), Value::Map(entries)) => {
            for (i, (key, val)) in entries.iter().enumerate() {
                check_value(key, k, schema, &format!("{path}<key {i}>"))?;
                check_value(val, v, schema, &format!("{path}[{i}]"))?;
            }
            Ok(())
        }
        (expected, got) => Err(EncodeError::mismatch(
            path,
            format!("expected {expected}, got {}", got.kind_name()),
        )),
    }
}

pub(crate) fn wire_type_of(kind: &BaseKind) -> u8 {
    match kind {
        BaseKind::Bool => wire::BOOL,
        BaseKind::I32 | BaseKind::Enum(_) => wire::I32,
        BaseKind::I64 => wire::I64,
        BaseKind::Double => wire::DOUBLE,
        BaseKind::Text | BaseKind::Binary => wire::BYTES,
        BaseKind::Record(_) => wire::RECORD,
        BaseKind::List(_) => wire::LIST,
        BaseKind::Map(_, _) => wire::MAP,
    }
}

trait PushUleb {
    fn push_uleb(&mut self, v: u64);
}

impl PushUleb for Vec<u8> {
    fn push_uleb(&mut self, v: u64) {
        write_uleb(self, v);
    }
}
