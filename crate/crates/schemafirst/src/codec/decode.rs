use std::sync::Arc;

use thiserror::Error;

use crate::model::{BaseKind, CompositeDef, ResolvedSchema};

use super::encode::wire_type_of;
use super::value::{RecordValue, Value};
use super::varint::{read_uleb, unzigzag32, unzigzag64};
use super::{wire, FORMAT_VERSION, MAGIC};

#[derive(Debug, Clone, Error)]
pub enum DecodeError {
    #[error("payload does not start with the expected magic bytes")]
    BadMagic,
    #[error("unknown asset '{0}'")]
    UnknownAsset(String),
    #[error("unknown version {version} of asset '{asset}'")]
    UnknownVersion { asset: String, version: u32 },
    #[error("payload ends mid-value")]
    TruncatedPayload,
    #[error("wire data does not match the schema: {message}")]
    WireTypeMismatch { message: String },
}

impl DecodeError {
    fn wire(message: impl Into<String>) -> Self {
        Self::WireTypeMismatch { message: message.into() }
    }
}

/// Where decode finds the schema a payload names in its header — a registry
/// or anything else that can produce resolved schemas by (asset, version).
pub trait SchemaLookup {
    fn schema_for(&self, asset: &str, version: u32) -> Result<Arc<ResolvedSchema>, DecodeError>;
}

/// A single explicit schema; useful for tests and for pinning a consumer at
/// a version regardless of what the payload embeds.
impl SchemaLookup for ResolvedSchema {
    fn schema_for(&self, asset: &str, _version: u32) -> Result<Arc<ResolvedSchema>, DecodeError> {
        if asset != self.root {
            return Err(DecodeError::UnknownAsset(asset.to_string()));
        }
        Ok(Arc::new(self.clone()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedRecord {
    pub record: RecordValue,
    pub asset: String,
    pub version: u32,
    /// Field ids present on the wire but not declared by the schema used to
    /// decode, in encounter order (nested records included).
    pub skipped_ids: Vec<i32>,
}

/// Decodes a payload, resolving its schema through `lookup` at the asset
/// and version named in the header.
pub fn decode(payload: &[u8], lookup: &impl SchemaLookup) -> Result<DecodedRecord, DecodeError> {
    let (asset, version, body_start) = read_header(payload)?;
    let schema = lookup.schema_for(&asset, version)?;
    decode_body(payload, body_start, &schema, asset, version)
}

/// Decodes with an explicit schema, ignoring the header's version. This is
/// the forward-compatibility path: a consumer pinned at an older schema
/// version skips fields added later.
pub fn decode_with_schema(
    payload: &[u8],
    schema: &ResolvedSchema,
) -> Result<DecodedRecord, DecodeError> {
    let (asset, version, body_start) = read_header(payload)?;
    if asset != schema.root {
        return Err(DecodeError::UnknownAsset(asset));
    }
    decode_body(payload, body_start, schema, asset, version)
}

fn read_header(payload: &[u8]) -> Result<(String, u32, usize), DecodeError> {
    if payload.len() < 3 || payload[0..2] != MAGIC {
        return Err(DecodeError::BadMagic);
    }
    if payload[2] != FORMAT_VERSION {
        return Err(DecodeError::wire(format!("unsupported format byte {:#04x}", payload[2])));
    }
    let mut pos = 3;
    let name_len = read_uleb(payload, &mut pos)? as usize;
    let name_end = pos.checked_add(name_len).ok_or(DecodeError::TruncatedPayload)?;
    if name_end > payload.len() {
        return Err(DecodeError::TruncatedPayload);
    }
    let asset = std::str::from_utf8(&payload[pos..name_end])
        .map_err(|_| DecodeError::wire("asset name is not UTF-8"))?
        .to_string();
    pos = name_end;
    let version = read_uleb(payload, &mut pos)?;
    let version =
        u32::try_from(version).map_err(|_| DecodeError::wire("version out of range"))?;
    Ok((asset, version, pos))
}

fn decode_body(
    payload: &[u8],
    body_start: usize,
    schema: &ResolvedSchema,
    asset: String,
    version: u32,
) -> Result<DecodedRecord, DecodeError> {
    let mut skipped = Vec::new();
    let mut pos = body_start;
    let record = decode_record(
        payload,
        &mut pos,
        payload.len(),
        schema.root_composite(),
        schema,
        &mut skipped,
    )?;
    // The body runs to the end of the payload by construction; a nested
    // record that overruns its declared length is caught in decode_record.
    Ok(DecodedRecord { record, asset, version, skipped_ids: skipped })
}

fn decode_record(
    bytes: &[u8],
    pos: &mut usize,
    end: usize,
    composite: &CompositeDef,
    schema: &ResolvedSchema,
    skipped: &mut Vec<i32>,
) -> Result<RecordValue, DecodeError> {
    let mut record = RecordValue::new(composite.fqn.clone());
    while *pos < end {
        let id = read_uleb(bytes, pos)?;
        let id = i32::try_from(id).map_err(|_| DecodeError::wire("field id out of range"))?;
        let wt = take_byte(bytes, pos, end)?;
        match composite.field(id) {
            Some(field) => {
                let kind = schema.base_kind(&field.ty);
                let expected = wire_type_of(&kind);
                if wt != expected {
                    return Err(DecodeError::wire(format!(
                        "field {} of {} carries wire type {wt}, schema expects {expected}",
                        field.name, composite.fqn
                    )));
                }
                if record.get(id).is_some() {
                    return Err(DecodeError::wire(format!(
                        "duplicate field id {id} in {}",
                        composite.fqn
                    )));
                }
                let value = decode_value(bytes, pos, end, &kind, schema, skipped)?;
                record.fields.push((id, value));
            }
            None => {
                skipped.push(id);
                skip_value(bytes, pos, end, wt)?;
            }
        }
    }
    if *pos != end {
        return Err(DecodeError::wire("record body overran its length"));
    }
    Ok(record)
}

fn decode_value(
    bytes: &[u8],
    pos: &mut usize,
    end: usize,
    kind: &BaseKind,
    schema: &ResolvedSchema,
    skipped: &mut Vec<i32>,
) -> Result<Value, DecodeError> {
    Ok(match kind {
        BaseKind::Bool => match take_byte(bytes, pos, end)? {
            0 => Value::Bool(false),
            1 => Value::Bool(true),
            b => return Err(DecodeError::wire(format!("bool byte must be 0 or 1, got {b}"))),
        },
        BaseKind::I32 => {
            let raw = bounded_uleb(bytes, pos, end)?;
            let raw =
                u32::try_from(raw).map_err(|_| DecodeError::wire("i32 varint out of range"))?;
            Value::I32(unzigzag32(raw))
        }
        BaseKind::Enum(fqn) => {
            let raw = bounded_uleb(bytes, pos, end)?;
            let raw =
                u32::try_from(raw).map_err(|_| DecodeError::wire("enum varint out of range"))?;
            Value::Enum { fqn: fqn.clone(), value: unzigzag32(raw) }
        }
        BaseKind::I64 => Value::I64(unzigzag64(bounded_uleb(bytes, pos, end)?)),
        BaseKind::Double => {
            let slice = take_slice(bytes, pos, end, 8)?;
            Value::Double(f64::from_le_bytes(slice.try_into().expect("eight bytes")))
        }
        BaseKind::Text => {
            let len = bounded_uleb(bytes, pos, end)? as usize;
            let slice = take_slice(bytes, pos, end, len)?;
            let text = std::str::from_utf8(slice)
                .map_err(|_| DecodeError::wire("text field is not valid UTF-8"))?;
            Value::Text(text.to_string())
        }
        BaseKind::Binary => {
            let len = bounded_uleb(bytes, pos, end)? as usize;
            Value::Bytes(take_slice(bytes, pos, end, len)?.to_vec())
        }
        BaseKind::Record(fqn) => {
            let len = bounded_uleb(bytes, pos, end)? as usize;
            let inner_end = pos.checked_add(len).ok_or(DecodeError::TruncatedPayload)?;
            if inner_end > end {
                return Err(DecodeError::TruncatedPayload);
            }
            let composite = schema
                .composite(fqn)
                .ok_or_else(|| DecodeError::wire(format!("struct {fqn} is not in the schema")))?;
            let nested = decode_record(bytes, pos, inner_end, composite, schema, skipped)?;
            Value::Record(nested)
        }
        BaseKind::List(elem) => {
            let wt = take_byte(bytes, pos, end)?;
            let expected = wire_type_of(elem);
            if wt != expected {
                return Err(DecodeError::wire(format!(
                    "list elements carry wire type {wt}, schema expects {expected}"
                )));
            }
            let count = bounded_uleb(bytes, pos, end)? as usize;
            let mut items = Vec::with_capacity(count.min(4096));
            for _ in 0..count {
                items.push(decode_value(bytes, pos, end, elem, schema, skipped)?);
            }
            Value::List(items)
        }
        BaseKind::Map(k, v) => {
            let kwt = take_byte(bytes, pos, end)?;
            let vwt = take_byte(bytes, pos, end)?;
            if kwt != wire_type_of(k) || vwt != wire_type_of(v) {
                return Err(DecodeError::wire("map wire types do not match the schema"));
            }
            let count = bounded_uleb(bytes, pos, end)? as usize;
            let mut entries = Vec::with_capacity(count.min(4096));
            for _ in 0..count {
                let key = decode_value(bytes, pos, end, k, schema, skipped)?;
                let val = decode_value(bytes, pos, end, v, schema, skipped)?;
                entries.push((key, val));
            }
            Value::Map(entries)
        }
    })
}

/// Advances past one value of the given wire type without interpreting it.
/// This is what makes unknown fields O(1) per field to ignore.
fn skip_value(bytes: &[u8], pos: &mut usize, end: usize, wt: u8) -> Result<(), DecodeError> {
    match wt {
        wire::BOOL => {
            take_byte(bytes, pos, end)?;
        }
        wire::I32 | wire::I64 => {
            bounded_uleb(bytes, pos, end)?;
        }
        wire::DOUBLE => {
            take_slice(bytes, pos, end, 8)?;
        }
        wire::BYTES | wire::RECORD => {
            let len = bounded_uleb(bytes, pos, end)? as usize;
            take_slice(bytes, pos, end, len)?;
        }
        wire::LIST => {
            let elem_wt = take_byte(bytes, pos, end)?;
            let count = bounded_uleb(bytes, pos, end)?;
            for _ in 0..count {
                skip_value(bytes, pos, end, elem_wt)?;
            }
        }
        wire::MAP => {
            let kwt = take_byte(bytes, pos, end)?;
            let vwt = take_byte(bytes, pos, end)?;
            let count = bounded_uleb(bytes, pos, end)?;
            for _ in 0..count {
                skip_value(bytes, pos, end, kwt)?;
                skip_value(bytes, pos, end, vwt)?;
            }
        }
        other => return Err(DecodeError::wire(format!("unknown wire type {other}"))),
    }
    Ok(())
}

fn take_byte(bytes: &[u8], pos: &mut usize, end: usize) -> Result<u8, DecodeError> {
    if *pos >= end {
        return Err(DecodeError::TruncatedPayload);
    }
    let b = bytes[*pos];
    *pos += 1;
    Ok(b)
}

fn take_slice<'a>(
    bytes: &'a [u8],
    pos: &mut usize,
    end: usize,
    len: usize,
) -> Result<&'a [u8], DecodeError> {
    let stop = pos.checked_add(len).ok_or(DecodeError::TruncatedPayload)?;
    if stop > end {
        return Err(DecodeError::TruncatedPayload);
    }
    let slice = &bytes[*pos..stop];
    *pos = stop;
    Ok(slice)
}

/// A LEB128 read that must not cross `end` (nested record boundary).
fn bounded_uleb(bytes: &[u8], pos: &mut usize, end: usize) -> Result<u64, DecodeError> {
    let v = read_uleb(&bytes[..end], pos)?;
    Ok(v)
}
