//! Lexer, parser, and pretty-printer for the annotated schema IDL.
//!
//! Schema files use the `.tsch` extension and a Thrift-like syntax:
//!
//! ```text
//! namespace observability
//!
//! @DisplayName{"Shard"}
//! typedef string ShardID
//!
//! struct RequestCounter {
//!   1: string service_id
//!   2: optional string endpoint
//! }
//! ```
//!
//! Annotations (`@Name`, `@Name{literal}`, `@Name{key=value, ...}`) bind to
//! the immediately following definition or field. [`parse`] produces an
//! [`AstDocument`]; [`render`] pretty-prints it back to canonical text such
//! that `parse(render(doc))` is structurally equal to `doc`.

mod ast;
mod lexer;
mod loader;
mod parser;
mod render;
mod token;

pub use ast::{
    AnnotationArg, AstAnnotation, AstComposite, AstDefinition, AstDocument, AstEnum, AstEnumEntry,
    AstField, AstTypedef, Literal, TypeExpr,
};
pub use lexer::tokenize;
pub use loader::{load_documents, IdlError};
pub use parser::parse;
pub use render::render;
pub use token::{LexError, ParseError, SourcePos, Token, TokenKind};

/// Highest field id the wire format and parser accept.
pub const MAX_FIELD_ID: i64 = 32767;
