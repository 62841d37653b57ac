use std::fmt;

use super::token::SourcePos;

/// Parse result of one IDL source file.
///
/// Equality on AST nodes is structural: source positions and the originating
/// file name are ignored, so `parse(render(doc))` compares equal to `doc`.
#[derive(Debug, Clone)]
pub struct AstDocument {
    pub file: String,
    pub namespace: String,
    pub includes: Vec<String>,
    pub definitions: Vec<AstDefinition>,
}

impl PartialEq for AstDocument {
    fn eq(&self, other: &Self) -> bool {
        self.namespace == other.namespace
            && self.includes == other.includes
            && self.definitions == other.definitions
    }
}

impl AstDocument {
    /// Fully qualified name of a definition declared in this document.
    pub fn qualify(&self, name: &str) -> String {
        format!("{}.{}", self.namespace, name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AstDefinition {
    Typedef(AstTypedef),
    Enum(AstEnum),
    Struct(AstComposite),
}

impl AstDefinition {
    pub fn name(&self) -> &str {
        match self {
            AstDefinition::Typedef(t) => &t.name,
            AstDefinition::Enum(e) => &e.name,
            AstDefinition::Struct(s) => &s.name,
        }
    }

    pub fn pos(&self) -> &SourcePos {
        match self {
            AstDefinition::Typedef(t) => &t.pos,
            AstDefinition::Enum(e) => &e.pos,
            AstDefinition::Struct(s) => &s.pos,
        }
    }
}

/// `typedef <base> <name>` with preceding annotations.
#[derive(Debug, Clone)]
pub struct AstTypedef {
    pub name: String,
    pub base: TypeExpr,
    pub annotations: Vec<AstAnnotation>,
    pub pos: SourcePos,
}

impl PartialEq for AstTypedef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.base == other.base && self.annotations == other.annotations
    }
}

#[derive(Debug, Clone)]
pub struct AstEnum {
    pub name: String,
    pub entries: Vec<AstEnumEntry>,
    pub annotations: Vec<AstAnnotation>,
    pub pos: SourcePos,
}

impl PartialEq for AstEnum {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.entries == other.entries
            && self.annotations == other.annotations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AstEnumEntry {
    pub name: String,
    pub value: i32,
}

/// `struct <name> [embeds A, B] { fields }`.
///
/// Embedded composites are flattened into the owner during resolution; the
/// AST keeps the embed list as written.
#[derive(Debug, Clone)]
pub struct AstComposite {
    pub name: String,
    pub embeds: Vec<String>,
    pub fields: Vec<AstField>,
    pub annotations: Vec<AstAnnotation>,
    pub pos: SourcePos,
}

impl PartialEq for AstComposite {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.embeds == other.embeds
            && self.fields == other.fields
            && self.annotations == other.annotations
    }
}

/// `<id>: [optional] <Type> <name>` with preceding annotations.
///
/// Fields without the `optional` qualifier must be populated by writers;
/// readers tolerate absence either way.
#[derive(Debug, Clone)]
pub struct AstField {
    pub id: i32,
    pub name: String,
    pub ty: TypeExpr,
    pub optional: bool,
    pub annotations: Vec<AstAnnotation>,
    pub pos: SourcePos,
}

impl PartialEq for AstField {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.name == other.name
            && self.ty == other.ty
            && self.optional == other.optional
            && self.annotations == other.annotations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeExpr {
    Bool,
    I32,
    I64,
    Double,
    Text,
    Binary,
    List(Box<TypeExpr>),
    Map(Box<TypeExpr>, Box<TypeExpr>),
    Named(String),
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Bool => write!(f, "bool"),
            TypeExpr::I32 => write!(f, "i32"),
            TypeExpr::I64 => write!(f, "i64"),
            TypeExpr::Double => write!(f, "double"),
            TypeExpr::Text => write!(f, "string"),
            TypeExpr::Binary => write!(f, "binary"),
            TypeExpr::List(t) => write!(f, "list<{t}>"),
            TypeExpr::Map(k, v) => write!(f, "map<{k}, {v}>"),
            TypeExpr::Named(n) => write!(f, "{n}"),
        }
    }
}

/// `@Name`, `@Name{literal}`, or `@Name{key=value, ...}`.
#[derive(Debug, Clone)]
pub struct AstAnnotation {
    pub name: String,
    pub args: Vec<AnnotationArg>,
    pub pos: SourcePos,
}

impl PartialEq for AstAnnotation {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.args == other.args
    }
}

impl AstAnnotation {
    /// The single positional argument, if any. At most one is allowed and it
    /// must come first; the parser enforces that.
    pub fn positional(&self) -> Option<&Literal> {
        self.args.first().filter(|a| a.key.is_none()).map(|a| &a.value)
    }

    pub fn keyed(&self, key: &str) -> Option<&Literal> {
        self.args.iter().find(|a| a.key.as_deref() == Some(key)).map(|a| &a.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationArg {
    pub key: Option<String>,
    pub value: Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Str(String),
    Int(i64),
    /// A bare or dotted identifier, e.g. `SOURCE` or `InfraEnum.DataCenter_Host`.
    Path(String),
}

impl Literal {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            Literal::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Literal::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_path(&self) -> Option<&str> {
        match self {
            Literal::Path(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Str(s) => write!(f, "{s:?}"),
            Literal::Int(n) => write!(f, "{n}"),
            Literal::Path(p) => write!(f, "{p}"),
        }
    }
}
