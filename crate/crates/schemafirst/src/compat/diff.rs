use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{FieldDef, ResolvedSchema, TypeDef};

use super::CompatError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChangeKind {
    AddField,
    RemoveField,
    RenameField,
    ChangeFieldType,
    ChangeOptionality,
    ReuseFieldId,
    AddEnumValue,
    RemoveEnumValue,
    RenameEnumValue,
    ChangeSemanticType,
    ChangeUnit,
    ChangeValidation,
    MetadataOnly,
}

/// One classified difference between two schema versions.
///
/// `before`/`after` hold kind-specific canonical text: field names for
/// renames, wire shapes for type changes, `optional`/`required` for
/// optionality flips, and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Change {
    pub kind: ChangeKind,
    pub type_fqn: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field_id: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub before: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub after: Option<String>,
}

impl Change {
    fn new(kind: ChangeKind, type_fqn: &str, field_id: Option<i32>) -> Self {
        Self { kind, type_fqn: type_fqn.to_string(), field_id, before: None, after: None }
    }

    fn with(mut self, before: Option<String>, after: Option<String>) -> Self {
        self.before = before;
        self.after = after;
        self
    }
}

/// Field ids used by any historical version but absent from the current
/// one, keyed by composite fqn. Re-adding such an id is flagged
/// [`ChangeKind::ReuseFieldId`]: an old payload would silently decode its
/// bytes as the new field.
#[derive(Debug, Clone, Default)]
pub struct DiffHistory {
    pub retired_ids: BTreeMap<String, BTreeSet<i32>>,
}

/// Diffs two versions of the same asset without version history; id reuse
/// is then indistinguishable from a fresh add.
pub fn diff(old: &ResolvedSchema, new: &ResolvedSchema) -> Result<Vec<Change>, CompatError> {
    diff_with_history(old, new, &DiffHistory::default())
}

pub fn diff_with_history(
    old: &ResolvedSchema,
    new: &ResolvedSchema,
    history: &DiffHistory,
) -> Result<Vec<Change>, CompatError> {
    if old.root != new.root {
        return Err(CompatError::RootMismatch { old: old.root.clone(), new: new.root.clone() });
    }

    let mut changes = Vec::new();
    let fqns: BTreeSet<&String> = old.types.keys().chain(new.types.keys()).collect();
    for fqn in fqns {
        match (old.types.get(fqn.as_str()), new.types.get(fqn.as_str())) {
            (Some(TypeDef::Composite(oc)), Some(TypeDef::Composite(nc))) => {
                diff_composite(old, new, fqn, &oc.fields, &nc.fields, history, &mut changes);
            }
            (Some(TypeDef::Enum(oe)), Some(TypeDef::Enum(ne))) => {
                let values: BTreeSet<i32> = oe
                    .entries
                    .iter()
                    .chain(ne.entries.iter())
                    .map(|e| e.value)
                    .collect();
                for value in values {
                    match (oe.name_of(value), ne.name_of(value)) {
                        (Some(o), Some(n)) if o != n => changes.push(
                            Change::new(ChangeKind::RenameEnumValue, fqn, Some(value))
                                .with(Some(o.into()), Some(n.into())),
                        ),
                        (Some(_), Some(_)) => {}
                        (None, Some(n)) => changes.push(
                            Change::new(ChangeKind::AddEnumValue, fqn, Some(value))
                                .with(None, Some(n.into())),
                        ),
                        (Some(o), None) => changes.push(
                            Change::new(ChangeKind::RemoveEnumValue, fqn, Some(value))
                                .with(Some(o.into()), None),
                        ),
                        (None, None) => unreachable!(),
                    }
                }
            }
            // Types appearing or disappearing from the reachable closure are
            // always accompanied by a change on the field or type that
            // references them, so they carry no change of their own.
            _ => {}
        }
    }
    Ok(changes)
}

fn diff_composite(
    old: &ResolvedSchema,
    new: &ResolvedSchema,
    fqn: &str,
    old_fields: &[FieldDef],
    new_fields: &[FieldDef],
    history: &DiffHistory,
    changes: &mut Vec<Change>,
) {
    let retired = history.retired_ids.get(fqn);
    let ids: BTreeSet<i32> =
        old_fields.iter().chain(new_fields.iter()).map(|f| f.id).collect();
    for id in ids {
        let of = old_fields.iter().find(|f| f.id == id);
        let nf = new_fields.iter().find(|f| f.id == id);
        match (of, nf) {
            (Some(of), Some(nf)) => {
                let before = changes.len();
                if of.name != nf.name {
                    changes.push(
                        Change::new(ChangeKind::RenameField, fqn, Some(id))
                            .with(Some(of.name.clone()), Some(nf.name.clone())),
                    );
                }
                let (old_shape, new_shape) =
                    (old.base_kind(&of.ty).to_string(), new.base_kind(&nf.ty).to_string());
                if old_shape != new_shape {
                    changes.push(
                        Change::new(ChangeKind::ChangeFieldType, fqn, Some(id))
                            .with(Some(old_shape), Some(new_shape)),
                    );
                }
                if of.optional != nf.optional {
                    changes.push(
                        Change::new(ChangeKind::ChangeOptionality, fqn, Some(id))
                            .with(Some(opt_text(of)), Some(opt_text(nf))),
                    );
                }
                let (osem, nsem) = (
                    old.effective_semantic_type(of).map(|s| s.0.clone()),
                    new.effective_semantic_type(nf).map(|s| s.0.clone()),
                );
                if osem != nsem || of.qualifiers != nf.qualifiers {
                    changes.push(
                        Change::new(ChangeKind::ChangeSemanticType, fqn, Some(id))
                            .with(semantic_text(old, of), semantic_text(new, nf)),
                    );
                }
                let (ounit, nunit) = (old.effective_unit(of), new.effective_unit(nf));
                if ounit != nunit {
                    changes.push(
                        Change::new(ChangeKind::ChangeUnit, fqn, Some(id)).with(
                            ounit.map(String::from),
                            nunit.map(String::from),
                        ),
                    );
                }
                let (oval, nval) = (old.effective_validation(of), new.effective_validation(nf));
                if oval != nval {
                    changes.push(
                        Change::new(ChangeKind::ChangeValidation, fqn, Some(id)).with(
                            oval.map(String::from),
                            nval.map(String::from),
                        ),
                    );
                }
                if changes.len() == before && field_signature(old, of) != field_signature(new, nf)
                {
                    changes.push(Change::new(ChangeKind::MetadataOnly, fqn, Some(id)));
                }
            }
            (Some(of), None) => changes.push(
                Change::new(ChangeKind::RemoveField, fqn, Some(id))
                    .with(Some(field_text(old, of)), None),
            ),
            (None, Some(nf)) => {
                let kind = if retired.is_some_and(|r| r.contains(&id)) {
                    ChangeKind::ReuseFieldId
                } else {
                    ChangeKind::AddField
                };
                changes.push(Change::new(kind, fqn, Some(id)).with(None, Some(field_text(new, nf))));
            }
            (None, None) => unreachable!(),
        }
    }
}

fn opt_text(f: &FieldDef) -> String {
    if f.optional { "optional".into() } else { "required".into() }
}

fn field_text(schema: &ResolvedSchema, f: &FieldDef) -> String {
    format!("{}: {} {} {}", f.id, opt_text(f), schema.base_kind(&f.ty), f.name)
}

fn semantic_text(schema: &ResolvedSchema, f: &FieldDef) -> Option<String> {
    let mut parts = Vec::new();
    if let Some(s) = schema.effective_semantic_type(f) {
        parts.push(s.0.clone());
    }
    for q in &f.qualifiers {
        parts.push(format!("{}={}", q.qualifier, q.value_name));
    }
    if parts.is_empty() {
        None
    } else {
        Some(parts.join(" "))
    }
}

/// Everything about a field and its rich-type chain, for the metadata-only
/// catch-all comparison.
fn field_signature(schema: &ResolvedSchema, f: &FieldDef) -> String {
    let mut sig = serde_json::to_string(f).expect("field serializes");
    let mut ty = f.ty.clone();
    while let crate::model::TypeRef::Named(fqn) = ty {
        match schema.rich(&fqn) {
            Some(rt) => {
                sig.push_str(&serde_json::to_string(rt).expect("rich type serializes"));
                ty = rt.base.clone();
            }
            None => break,
        }
    }
    sig
}
