use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A position inside an IDL source file. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourcePos {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourcePos {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        Self { file: file.into(), line, column }
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    // Keywords.
    Namespace,
    Include,
    Typedef,
    Enum,
    Struct,
    Embeds,
    Optional,
    /// A plain identifier, e.g. `ShardID`.
    Ident(String),
    /// A dotted identifier path, e.g. `InfraEnum.DataCenter_Host`.
    Path(String),
    Int(i64),
    Str(String),
    At,
    LBrace,
    RBrace,
    LAngle,
    RAngle,
    Comma,
    Colon,
    Semicolon,
    Equals,
    Eof,
}

impl TokenKind {
    /// Short human-readable description used in error messages.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Namespace => "'namespace'".into(),
            TokenKind::Include => "'include'".into(),
            TokenKind::Typedef => "'typedef'".into(),
            TokenKind::Enum => "'enum'".into(),
            TokenKind::Struct => "'struct'".into(),
            TokenKind::Embeds => "'embeds'".into(),
            TokenKind::Optional => "'optional'".into(),
            TokenKind::Ident(s) => format!("identifier '{s}'"),
            TokenKind::Path(s) => format!("path '{s}'"),
            TokenKind::Int(n) => format!("integer {n}"),
            TokenKind::Str(_) => "string literal".into(),
            TokenKind::At => "'@'".into(),
            TokenKind::LBrace => "'{'".into(),
            TokenKind::RBrace => "'}'".into(),
            TokenKind::LAngle => "'<'".into(),
            TokenKind::RAngle => "'>'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::Colon => "':'".into(),
            TokenKind::Semicolon => "';'".into(),
            TokenKind::Equals => "'='".into(),
            TokenKind::Eof => "end of file".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, Error)]
#[error("{pos}: {message}")]
pub struct LexError {
    pub pos: SourcePos,
    pub message: String,
}

/// Parse failure with the offending position and the token set the parser
/// would have accepted there.
#[derive(Debug, Clone, Error)]
pub struct ParseError {
    pub pos: SourcePos,
    pub found: String,
    pub expected: Vec<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {}, found {})", self.expected.join(" or "), self.found)?;
        }
        Ok(())
    }
}
