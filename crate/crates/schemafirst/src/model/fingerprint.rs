use std::collections::BTreeMap;

use super::types::{FieldDef, TypeDef};

/// FNV-1a over 64 bits. Chosen because it is trivial to reimplement
/// identically in any language; not collision-resistant against adversaries.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

/// Computes the (structural, semantic) fingerprint pair.
///
/// Both hash a canonical byte serialization: one line per element, fields
/// sorted by id, types sorted by fqn, tokens separated by `\x1f`. The
/// structural projection covers field ids, names, types, optionality, and
/// the root name. The semantic projection additionally covers semantic
/// types, qualifiers, units, validation, privacy, and conversions. Display
/// names and descriptions appear in neither.
pub fn fingerprint(root: &str, types: &BTreeMap<String, TypeDef>) -> (u64, u64) {
    (
        fnv1a64(&projection(root, types, false)),
        fnv1a64(&projection(root, types, true)),
    )
}

fn projection(root: &str, types: &BTreeMap<String, TypeDef>, semantic: bool) -> Vec<u8> {
    const SEP: char = '\x1f';
    let mut out = String::new();
    let line = |parts: &[&str], out: &mut String| {
        let mut first = true;
        for p in parts {
            if !first {
                out.push(SEP);
            }
            out.push_str(p);
            first = false;
        }
        out.push('\n');
    };

    line(&["root", root], &mut out);
    for (fqn, def) in types {
        match def {
            TypeDef::Composite(c) => {
                line(&["composite", fqn], &mut out);
                let mut fields: Vec<&FieldDef> = c.fields.iter().collect();
                fields.sort_by_key(|f| f.id);
                for f in fields {
                    let id = f.id.to_string();
                    let ty = f.ty.to_string();
                    let opt = if f.optional { "optional" } else { "required" };
                    if semantic {
                        let semtype = f
                            .semantic_type
                            .as_ref()
                            .map(|s| s.0.clone())
                            .unwrap_or_default();
                        let mut quals: Vec<String> = f
                            .qualifiers
                            .iter()
                            .map(|q| format!("{}={}:{}", q.qualifier, q.value_name, q.value))
                            .collect();
                        quals.sort();
                        let quals = quals.join(";");
                        let privacy = f
                            .privacy
                            .as_ref()
                            .map(|p| format!("{}:{}", p.category, p.retention_days))
                            .unwrap_or_default();
                        let measurement = if f.measurement { "measurement" } else { "" };
                        line(
                            &[
                                "field",
                                &id,
                                &f.name,
                                &ty,
                                opt,
                                &semtype,
                                &quals,
                                &privacy,
                                measurement,
                            ],
                            &mut out,
                        );
                    } else {
                        line(&["field", &id, &f.name, &ty, opt], &mut out);
                    }
                }
            }
            TypeDef::Enum(e) => {
                line(&["enum", fqn], &mut out);
                let mut entries = e.entries.clone();
                entries.sort_by_key(|en| en.value);
                for en in entries {
                    line(&["entry", &en.value.to_string(), &en.name], &mut out);
                }
            }
            TypeDef::Rich(r) => {
                let base = r.base.to_string();
                if semantic {
                    let semtype =
                        r.semantic_type.as_ref().map(|s| s.0.clone()).unwrap_or_default();
                    let unit = r.unit.clone().unwrap_or_default();
                    let validate = r.validate_regex.clone().unwrap_or_default();
                    let mut convs: Vec<String> = r
                        .conversions
                        .iter()
                        .map(|c| format!("{}:{:?}:{}", c.target, c.how, c.invertible))
                        .collect();
                    convs.sort();
                    let convs = convs.join(";");
                    let ops = r.allowed_ops.join(",");
                    line(&["rich", fqn, &base, &semtype, &unit, &validate, &convs, &ops], &mut out);
                } else {
                    line(&["rich", fqn, &base], &mut out);
                }
            }
        }
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_vectors() {
        // Published FNV-1a-64 test vectors.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }
}
