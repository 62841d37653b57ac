//! Schema-version compatibility: diffing, breaking-change classification,
//! and consumer-side record migration.
//!
//! [`diff`] matches fields by id within each type, so a renamed field (same
//! id, same type) is recognized as a rename rather than a remove/add pair.
//! [`classify`] applies a fixed rule table to every change; the verdict is
//! breaking as soon as one change is. Compatible change sets yield a
//! [`MigrationTransform`] — the recorded renames that let consumers upgrade
//! or downgrade decoded records across versions with [`migrate_record`].

mod classify;
mod diff;
mod transform;

pub use classify::{classify, ClassifyOptions, Outcome, RuledChange, Ruling, Verdict};
pub use diff::{diff, diff_with_history, Change, ChangeKind, DiffHistory};
pub use transform::{
    build_transforms, migrate_record, EnumRename, FieldRename, MigrationTransform,
};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CompatError {
    #[error("schemas have different roots: '{old}' vs '{new}'")]
    RootMismatch { old: String, new: String },
    #[error("change set contains breaking changes; no transform exists")]
    BreakingNotTransformable,
    #[error("transform chain has a gap at version {from} -> {to}")]
    TransformGap { from: u32, to: u32 },
}
