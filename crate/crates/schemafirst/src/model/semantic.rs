use serde::{Deserialize, Serialize};

use super::types::{BaseKind, QualifierValue, ResolvedSchema, SemanticTypeId};

/// One field carrying a semantic type, located by its dotted path from the
/// asset root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticFieldEntry {
    pub path: String,
    pub semantic_type: SemanticTypeId,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub qualifiers: Vec<QualifierValue>,
    /// The rich type that supplied the semantic type, when it came from one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rich_type: Option<String>,
}

/// Lists every field in the schema whose effective type carries a semantic
/// type, walking nested composites depth-first from the root.
pub fn semantic_fields(schema: &ResolvedSchema) -> Vec<SemanticFieldEntry> {
    let mut out = Vec::new();
    let mut visiting = vec![schema.root.clone()];
    walk(schema, &schema.root, "", &mut visiting, &mut out);
    out
}

fn walk(
    schema: &ResolvedSchema,
    composite_fqn: &str,
    prefix: &str,
    visiting: &mut Vec<String>,
    out: &mut Vec<SemanticFieldEntry>,
) {
    let Some(composite) = schema.composite(composite_fqn) else { return };
    for field in &composite.fields {
        let path =
            if prefix.is_empty() { field.name.clone() } else { format!("{prefix}.{}", field.name) };
        if let Some(semantic_type) = schema.effective_semantic_type(field) {
            out.push(SemanticFieldEntry {
                path: path.clone(),
                semantic_type: semantic_type.clone(),
                qualifiers: field.qualifiers.clone(),
                rich_type: schema.semantic_rich_type(field).map(|rt| rt.fqn.clone()),
            });
        }
        // Descend into struct-typed fields; recursion through a type already
        // on the path is cut off.
        if let BaseKind::Record(inner) = schema.base_kind(&field.ty) {
            if !visiting.contains(&inner) {
                visiting.push(inner.clone());
                walk(schema, &inner, &path, visiting, out);
                visiting.pop();
            }
        }
    }
}
