use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Identifier shared by every representation of one real-world concept,
/// e.g. `InfraEnum.DataCenter_Host`. Dotted path of identifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SemanticTypeId(pub String);

impl fmt::Display for SemanticTypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SemanticTypeId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

/// A resolved type reference. Named types point into the schema's type
/// universe by fully qualified name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeRef {
    Bool,
    I32,
    I64,
    Double,
    Text,
    Binary,
    List(Box<TypeRef>),
    Map(Box<TypeRef>, Box<TypeRef>),
    Named(String),
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Bool => write!(f, "bool"),
            TypeRef::I32 => write!(f, "i32"),
            TypeRef::I64 => write!(f, "i64"),
            TypeRef::Double => write!(f, "double"),
            TypeRef::Text => write!(f, "string"),
            TypeRef::Binary => write!(f, "binary"),
            TypeRef::List(t) => write!(f, "list<{t}>"),
            TypeRef::Map(k, v) => write!(f, "map<{k}, {v}>"),
            TypeRef::Named(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for TypeRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s {
            "bool" => TypeRef::Bool,
            "i32" => TypeRef::I32,
            "i64" => TypeRef::I64,
            "double" => TypeRef::Double,
            "string" => TypeRef::Text,
            "binary" => TypeRef::Binary,
            _ => {
                if let Some(inner) = s.strip_prefix("list<").and_then(|r| r.strip_suffix('>')) {
                    TypeRef::List(Box::new(inner.parse()?))
                } else if let Some(inner) = s.strip_prefix("map<").and_then(|r| r.strip_suffix('>'))
                {
                    let split = top_level_comma(inner)
                        .ok_or_else(|| format!("malformed map type: {s}"))?;
                    TypeRef::Map(
                        Box::new(inner[..split].parse()?),
                        Box::new(inner[split + 1..].parse()?),
                    )
                } else if !s.is_empty() && !s.contains(['<', '>', ',', ' ']) {
                    TypeRef::Named(s.to_string())
                } else {
                    return Err(format!("malformed type: {s}"));
                }
            }
        })
    }
}

/// Index of the comma separating map key and value types, ignoring commas
/// nested inside angle brackets.
fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '<' => depth += 1,
            '>' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

impl Serialize for TypeRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TypeRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The wire-level shape a type resolves to once typedef chains collapse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseKind {
    Bool,
    I32,
    I64,
    Double,
    Text,
    Binary,
    List(Box<BaseKind>),
    Map(Box<BaseKind>, Box<BaseKind>),
    /// Enum values travel as i32 but keep their declaring type's identity.
    Enum(String),
    Record(String),
}

impl BaseKind {
    pub fn is_numeric(&self) -> bool {
        matches!(self, BaseKind::I32 | BaseKind::I64 | BaseKind::Double)
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseKind::Bool => write!(f, "bool"),
            BaseKind::I32 => write!(f, "i32"),
            BaseKind::I64 => write!(f, "i64"),
            BaseKind::Double => write!(f, "double"),
            BaseKind::Text => write!(f, "string"),
            BaseKind::Binary => write!(f, "binary"),
            BaseKind::List(t) => write!(f, "list<{t}>"),
            BaseKind::Map(k, v) => write!(f, "map<{k}, {v}>"),
            BaseKind::Enum(fqn) => write!(f, "enum:{fqn}"),
            BaseKind::Record(fqn) => write!(f, "record:{fqn}"),
        }
    }
}

/// How one rich-type representation converts into another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConversionHow {
    Identity,
    TruncateAtFirstDot,
}

/// Declared relationship between two representations of the same semantic
/// type, e.g. fully-qualified host name to short host name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversionDecl {
    pub target: String,
    pub how: ConversionHow,
    pub invertible: bool,
}

/// A literal captured from an annotation that the resolver does not
/// interpret.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpaqueValue {
    Str(String),
    Int(i64),
    Path(String),
}

/// An annotation outside the built-in vocabulary, carried through verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpaqueAnnotation {
    pub name: String,
    pub args: Vec<(Option<String>, OpaqueValue)>,
}

/// A typedef over a base type, enriched with machine-readable metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichType {
    pub fqn: String,
    pub base: TypeRef,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub display_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub description: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub semantic_type: Option<SemanticTypeId>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub validate_regex: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub conversions: Vec<ConversionDecl>,
    /// Query operators declared legal for fields of this type. Parsed and
    /// stored; the query engine currently executes equality only.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub allowed_ops: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub extras: Vec<OpaqueAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumEntry {
    pub name: String,
    pub value: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumDef {
    pub fqn: String,
    pub entries: Vec<EnumEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub display_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub description: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub extras: Vec<OpaqueAnnotation>,
}

impl EnumDef {
    pub fn value_of(&self, name: &str) -> Option<i32> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    pub fn name_of(&self, value: i32) -> Option<&str> {
        self.entries.iter().find(|e| e.value == value).map(|e| e.name.as_str())
    }
}

/// A field's role marker: which qualifier type was applied and with which
/// enum value, e.g. (`mesh.OneWayMsgExchangeActor`, `SOURCE`, 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualifierValue {
    pub qualifier: String,
    pub value_name: String,
    pub value: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivacyPolicy {
    pub category: String,
    pub retention_days: i64,
}

/// One field of a composite after flattening.
///
/// `origin` names the composite that declared the field, which differs from
/// the owner when the field arrived through an `embeds` clause.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDef {
    pub id: i32,
    pub name: String,
    #[serde(rename = "type")]
    pub ty: TypeRef,
    #[serde(skip_serializing_if = "is_false", default)]
    pub optional: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub display_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub description: Option<String>,
    /// Field-level semantic type; overrides the rich type's when both exist.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub semantic_type: Option<SemanticTypeId>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub qualifiers: Vec<QualifierValue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub privacy: Option<PrivacyPolicy>,
    #[serde(skip_serializing_if = "is_false", default)]
    pub measurement: bool,
    pub origin: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub extras: Vec<OpaqueAnnotation>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeDef {
    pub fqn: String,
    /// Fields in declaration order with embedded composites already
    /// flattened in.
    pub fields: Vec<FieldDef>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub display_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub description: Option<String>,
    /// Marks an annotation-type declaration usable as a semantic qualifier.
    #[serde(skip_serializing_if = "is_false", default)]
    pub semantic_qualifier: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub extras: Vec<OpaqueAnnotation>,
}

impl CompositeDef {
    pub fn field(&self, id: i32) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.id == id)
    }

    pub fn field_named(&self, name: &str) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TypeDef {
    Rich(RichType),
    Enum(EnumDef),
    Composite(CompositeDef),
}

impl TypeDef {
    pub fn fqn(&self) -> &str {
        match self {
            TypeDef::Rich(t) => &t.fqn,
            TypeDef::Enum(e) => &e.fqn,
            TypeDef::Composite(c) => &c.fqn,
        }
    }
}

/// The fully-resolved, cycle-checked type universe for one telemetry asset.
///
/// The `types` map holds everything reachable from `root`; the canonical
/// JSON serialization of this struct is both the registry storage format
/// and the basis of the fingerprints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSchema {
    pub root: String,
    pub types: BTreeMap<String, TypeDef>,
    #[serde(with = "hex64")]
    pub fingerprint_structural: u64,
    #[serde(with = "hex64")]
    pub fingerprint_semantic: u64,
    /// Resolve-time advice (e.g. a field-level semantic type shadowing the
    /// rich type's). Not part of the canonical serialization.
    #[serde(skip)]
    pub lints: Vec<String>,
}

impl ResolvedSchema {
    pub fn composite(&self, fqn: &str) -> Option<&CompositeDef> {
        match self.types.get(fqn) {
            Some(TypeDef::Composite(c)) => Some(c),
            _ => None,
        }
    }

    pub fn rich(&self, fqn: &str) -> Option<&RichType> {
        match self.types.get(fqn) {
            Some(TypeDef::Rich(t)) => Some(t),
            _ => None,
        }
    }

    pub fn enum_def(&self, fqn: &str) -> Option<&EnumDef> {
        match self.types.get(fqn) {
            Some(TypeDef::Enum(e)) => Some(e),
            _ => None,
        }
    }

    pub fn root_composite(&self) -> &CompositeDef {
        self.composite(&self.root).expect("resolve guarantees the root composite exists")
    }

    /// Collapses typedef chains down to the wire-level shape.
    pub fn base_kind(&self, ty: &TypeRef) -> BaseKind {
        match ty {
            TypeRef::Bool => BaseKind::Bool,
            TypeRef::I32 => BaseKind::I32,
            TypeRef::I64 => BaseKind::I64,
            TypeRef::Double => BaseKind::Double,
            TypeRef::Text => BaseKind::Text,
            TypeRef::Binary => BaseKind::Binary,
            TypeRef::List(t) => BaseKind::List(Box::new(self.base_kind(t))),
            TypeRef::Map(k, v) => {
                BaseKind::Map(Box::new(self.base_kind(k)), Box::new(self.base_kind(v)))
            }
            TypeRef::Named(fqn) => match self.types.get(fqn) {
                Some(TypeDef::Rich(t)) => self.base_kind(&t.base),
                Some(TypeDef::Enum(_)) => BaseKind::Enum(fqn.clone()),
                Some(TypeDef::Composite(_)) => BaseKind::Record(fqn.clone()),
                // Resolve rejects dangling refs; this arm is unreachable on
                // schemas it produced.
                None => BaseKind::Record(fqn.clone()),
            },
        }
    }

    /// The chain of named rich types behind a type reference, outermost
    /// first.
    fn rich_chain(&self, ty: &TypeRef) -> Vec<&RichType> {
        let mut out = Vec::new();
        let mut cur = ty.clone();
        while let TypeRef::Named(fqn) = cur {
            match self.rich(&fqn) {
                Some(rt) => {
                    out.push(rt);
                    cur = rt.base.clone();
                }
                None => break,
            }
        }
        out
    }

    /// A field's semantic type: the field-level override when present,
    /// otherwise the first one found along its rich-type chain.
    pub fn effective_semantic_type<'a>(&'a self, field: &'a FieldDef) -> Option<&'a SemanticTypeId> {
        if field.semantic_type.is_some() {
            return field.semantic_type.as_ref();
        }
        self.rich_chain(&field.ty).iter().find_map(|rt| rt.semantic_type.as_ref())
    }

    /// The rich type that supplies a field's semantic type, if any.
    pub fn semantic_rich_type(&self, field: &FieldDef) -> Option<&RichType> {
        self.rich_chain(&field.ty).into_iter().find(|rt| rt.semantic_type.is_some())
    }

    pub fn effective_unit(&self, field: &FieldDef) -> Option<&str> {
        self.rich_chain(&field.ty).iter().find_map(|rt| rt.unit.as_deref())
    }

    pub fn effective_validation(&self, field: &FieldDef) -> Option<&str> {
        self.rich_chain(&field.ty).iter().find_map(|rt| rt.validate_regex.as_deref())
    }

    pub fn effective_display_name<'a>(&'a self, field: &'a FieldDef) -> Option<&'a str> {
        if let Some(dn) = field.display_name.as_deref() {
            return Some(dn);
        }
        self.rich_chain(&field.ty).iter().find_map(|rt| rt.display_name.as_deref())
    }

    /// Canonical JSON: stable key order, fields in declaration order, types
    /// sorted by fqn. Registry storage format and fingerprint input.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("schema serialization cannot fail")
    }

    pub fn from_canonical_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

mod hex64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format!("{v:016x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<u64, D::Error> {
        let s = String::deserialize(deserializer)?;
        u64::from_str_radix(&s, 16).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_ref_text_round_trips() {
        for text in ["bool", "i32", "string", "list<i64>", "map<string, list<double>>", "a.b.C"] {
            let ty: TypeRef = text.parse().unwrap();
            assert_eq!(ty.to_string(), text);
        }
    }

    #[test]
    fn nested_map_parses() {
        let ty: TypeRef = "map<string, map<i32, string>>".parse().unwrap();
        assert_eq!(
            ty,
            TypeRef::Map(
                Box::new(TypeRef::Text),
                Box::new(TypeRef::Map(Box::new(TypeRef::I32), Box::new(TypeRef::Text)))
            )
        );
    }

    #[test]
    fn malformed_types_rejected() {
        assert!("list<".parse::<TypeRef>().is_err());
        assert!("map<i32>".parse::<TypeRef>().is_err());
        assert!("".parse::<TypeRef>().is_err());
    }
}
