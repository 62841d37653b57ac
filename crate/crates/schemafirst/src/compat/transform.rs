use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::classify::{Outcome, Verdict};
use super::diff::ChangeKind;
use super::CompatError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRename {
    pub type_fqn: String,
    pub field_id: i32,
    pub old_name: String,
    pub new_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumRename {
    pub enum_fqn: String,
    pub value: i32,
    pub old_name: String,
    pub new_name: String,
}

/// The renames recorded between two adjacent schema versions, enabling
/// consumers to upgrade or downgrade decoded records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MigrationTransform {
    pub from_version: u32,
    pub to_version: u32,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub field_renames: Vec<FieldRename>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub enum_renames: Vec<EnumRename>,
}

impl MigrationTransform {
    pub fn identity(from_version: u32, to_version: u32) -> Self {
        Self { from_version, to_version, field_renames: Vec::new(), enum_renames: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.field_renames.is_empty() && self.enum_renames.is_empty()
    }
}

/// Extracts the rename transform from a compatible verdict.
///
/// Only compatible change sets are transformable; call on a breaking one
/// and you get [`CompatError::BreakingNotTransformable`].
pub fn build_transforms(
    verdict: &Verdict,
    from_version: u32,
    to_version: u32,
) -> Result<MigrationTransform, CompatError> {
    if verdict.outcome == Outcome::Breaking {
        return Err(CompatError::BreakingNotTransformable);
    }
    let mut transform = MigrationTransform::identity(from_version, to_version);
    for ruled in &verdict.rulings {
        let change = &ruled.change;
        match change.kind {
            ChangeKind::RenameField => transform.field_renames.push(FieldRename {
                type_fqn: change.type_fqn.clone(),
                field_id: change.field_id.expect("renames carry a field id"),
                old_name: change.before.clone().expect("renames carry the old name"),
                new_name: change.after.clone().expect("renames carry the new name"),
            }),
            ChangeKind::RenameEnumValue => transform.enum_renames.push(EnumRename {
                enum_fqn: change.type_fqn.clone(),
                value: change.field_id.expect("enum renames carry the value"),
                old_name: change.before.clone().expect("enum renames carry the old name"),
                new_name: change.after.clone().expect("enum renames carry the new name"),
            }),
            _ => {}
        }
    }
    Ok(transform)
}

/// Migrates a decoded, name-keyed record between versions.
///
/// Upgrading applies the root type's field renames forward, downgrading
/// applies them inverted. Values are untouched and unknown fields carry
/// through. The transform list must cover every step between the two
/// versions, in either orientation.
pub fn migrate_record(
    record: &Map<String, Value>,
    from_version: u32,
    to_version: u32,
    transforms: &[MigrationTransform],
    root_fqn: &str,
) -> Result<Map<String, Value>, CompatError> {
    let mut out = record.clone();
    if from_version == to_version {
        return Ok(out);
    }
    let upgrade = from_version < to_version;
    let steps: Vec<(u32, u32)> = if upgrade {
        (from_version..to_version).map(|v| (v, v + 1)).collect()
    } else {
        (to_version..from_version).map(|v| (v, v + 1)).rev().collect()
    };
    for (lo, hi) in steps {
        let step = transforms
            .iter()
            .find(|t| t.from_version == lo && t.to_version == hi)
            .ok_or(CompatError::TransformGap { from: lo, to: hi })?;
        for rename in &step.field_renames {
            if rename.type_fqn != root_fqn {
                continue;
            }
            let (src, dst) = if upgrade {
                (&rename.old_name, &rename.new_name)
            } else {
                (&rename.new_name, &rename.old_name)
            };
            if let Some(value) = out.shift_remove(src.as_str()) {
                out.insert(dst.clone(), value);
            }
        }
    }
    Ok(out)
}
