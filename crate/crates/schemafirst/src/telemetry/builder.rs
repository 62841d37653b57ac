use std::sync::Arc;

use crate::codec::{check_value, encode, EncodeError, RecordValue, Value};
use crate::model::ResolvedSchema;

use super::queue::QueueFile;
use super::TelemetryError;

/// Schema-checked staging area for one record.
///
/// `set` only accepts fields the bound schema declares, with matching types
/// and passing `@Validate` rules, so a builder can never produce a payload
/// its own schema version fails to decode. The builder plays the role
/// generated datatypes play in a build-system integration, enforcing the
/// same contract at runtime.
#[derive(Debug, Clone)]
pub struct RecordBuilder {
    schema: Arc<ResolvedSchema>,
    version: u32,
    staged: RecordValue,
}

impl RecordBuilder {
    pub fn new(schema: Arc<ResolvedSchema>, version: u32) -> Self {
        let staged = RecordValue::new(schema.root.clone());
        Self { schema, version, staged }
    }

    pub fn schema(&self) -> &ResolvedSchema {
        &self.schema
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    /// Stages a value for a declared field, replacing any earlier value for
    /// it. Rejects undeclared names (the typo guard), type mismatches, and
    /// values violating the field's validation rule.
    pub fn set(&mut self, field_name: &str, value: impl Into<Value>) -> Result<&mut Self, EncodeError> {
        let root = self.schema.root_composite();
        let field = root.field_named(field_name).ok_or_else(|| EncodeError::UnknownField {
            path: self.schema.root.clone(),
            field: field_name.to_string(),
        })?;
        let value = value.into();
        let path = format!("{}.{}", self.schema.root, field_name);
        check_value(&value, &self.schema.base_kind(&field.ty), &self.schema, &path)?;
        if let (Some(pattern), Value::Text(text)) =
            (self.schema.effective_validation(field), &value)
        {
            let re = regex::Regex::new(pattern)
                .map_err(|e| EncodeError::TypeMismatch { path: path.clone(), message: e.to_string() })?;
            if !re.is_match(text) {
                return Err(EncodeError::ValidationFailure {
                    path,
                    message: format!("value {text:?} does not match /{pattern}/"),
                });
            }
        }
        let id = field.id;
        self.staged.fields.retain(|(fid, _)| *fid != id);
        self.staged.fields.push((id, value));
        Ok(self)
    }

    /// The staged record as built so far.
    pub fn record(&self) -> &RecordValue {
        &self.staged
    }

    /// Encodes the staged record; required fields must all be staged.
    pub fn encode(&self) -> Result<Vec<u8>, EncodeError> {
        encode(&self.staged, &self.schema, self.version)
    }

    /// Encodes and appends one frame to the queue, returning the payload.
    /// On any error the queue is left untouched.
    pub fn emit(&self, sink: &mut QueueFile) -> Result<Vec<u8>, TelemetryError> {
        let payload = self.encode()?;
        sink.append(&payload)?;
        Ok(payload)
    }
}
