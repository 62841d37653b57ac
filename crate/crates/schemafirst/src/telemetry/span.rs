use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codec::{decode, DecodedRecord, SchemaLookup};

use super::builder::RecordBuilder;
use super::TelemetryError;

/// The trace unit of work: identifiers, timing, and an open-ended
/// dictionary of schematized binary payloads keyed by the fully qualified
/// name of the schema type that encoded them.
///
/// Different teams attach their own payload types to the same span without
/// touching each other's bytes, which keeps the open-ended nature of trace
/// data while every payload stays individually decodable via the registry.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanEnvelope {
    pub trace_id: [u8; 16],
    pub span_id: [u8; 8],
    pub parent_span_id: Option<[u8; 8]>,
    pub name: String,
    /// Microseconds since the Unix epoch, supplied by the caller.
    pub start_us: u64,
    pub duration_us: u64,
    pub payloads: BTreeMap<String, Vec<u8>>,
}

/// Outcome of attaching a payload; `replaced` warns that an earlier payload
/// under the same key was overwritten (last writer wins).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttachReport {
    pub key: String,
    pub replaced: bool,
}

impl SpanEnvelope {
    pub fn new(trace_id: [u8; 16], span_id: [u8; 8], name: impl Into<String>) -> Self {
        Self {
            trace_id,
            span_id,
            parent_span_id: None,
            name: name.into(),
            start_us: 0,
            duration_us: 0,
            payloads: BTreeMap::new(),
        }
    }

    /// Encodes the builder's record and stores it under its schema's root
    /// fqn. One payload per type: re-attaching the same fqn replaces the
    /// previous bytes and the report says so.
    pub fn attach_payload(&mut self, builder: &RecordBuilder) -> Result<AttachReport, TelemetryError> {
        let payload = builder.encode()?;
        let key = builder.schema().root.clone();
        let replaced = self.payloads.insert(key.clone(), payload).is_some();
        Ok(AttachReport { key, replaced })
    }

    /// Decodes the payload stored under `fqn` using the schema version the
    /// payload itself names, resolved through the registry.
    pub fn read_payload(
        &self,
        fqn: &str,
        registry: &impl SchemaLookup,
    ) -> Result<DecodedRecord, TelemetryError> {
        let bytes = self
            .payloads
            .get(fqn)
            .ok_or_else(|| TelemetryError::PayloadNotFound { fqn: fqn.to_string() })?;
        Ok(decode(bytes, registry)?)
    }

    /// JSON form for inspection; byte fields render as lowercase hex.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SpanJson::from(self)).expect("span serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, serde_json::Error> {
        let json: SpanJson = serde_json::from_value(value.clone())?;
        json.try_into().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SpanJson {
    trace_id: String,
    span_id: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    parent_span_id: Option<String>,
    name: String,
    start_us: u64,
    duration_us: u64,
    payloads: BTreeMap<String, String>,
}

impl From<&SpanEnvelope> for SpanJson {
    fn from(span: &SpanEnvelope) -> Self {
        Self {
            trace_id: hex::encode(span.trace_id),
            span_id: hex::encode(span.span_id),
            parent_span_id: span.parent_span_id.map(hex::encode),
            name: span.name.clone(),
            start_us: span.start_us,
            duration_us: span.duration_us,
            payloads: span
                .payloads
                .iter()
                .map(|(k, v)| (k.clone(), hex::encode(v)))
                .collect(),
        }
    }
}

impl TryFrom<SpanJson> for SpanEnvelope {
    type Error = String;

    fn try_from(json: SpanJson) -> Result<Self, Self::Error> {
        fn array<const N: usize>(hex_str: &str, what: &str) -> Result<[u8; N], String> {
            let bytes = hex::decode(hex_str).map_err(|e| format!("{what}: {e}"))?;
            bytes.try_into().map_err(|_| format!("{what}: wrong length"))
        }
        let mut payloads = BTreeMap::new();
        for (k, v) in json.payloads {
            payloads.insert(k, hex::decode(&v).map_err(|e| format!("payload: {e}"))?);
        }
        Ok(Self {
            trace_id: array::<16>(&json.trace_id, "trace_id")?,
            span_id: array::<8>(&json.span_id, "span_id")?,
            parent_span_id: match json.parent_span_id {
                Some(p) => Some(array::<8>(&p, "parent_span_id")?),
                None => None,
            },
            name: json.name,
            start_us: json.start_us,
            duration_us: json.duration_us,
            payloads,
        })
    }
}
