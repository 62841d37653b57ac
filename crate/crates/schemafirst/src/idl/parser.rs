use std::collections::HashSet;

use super::ast::*;
use super::lexer::tokenize;
use super::token::{ParseError, SourcePos, Token, TokenKind};
use super::MAX_FIELD_ID;

/// Parses one IDL source file into an [`AstDocument`].
///
/// The grammar accepts `namespace`, `include`, `typedef`, `enum` with
/// `name = value` entries, and `struct` with an optional `embeds` clause.
/// Fields are written `<id>: [optional] <Type> <name>`. Annotations bind to
/// the immediately following definition or field. Adjacent string literals
/// concatenate, so long descriptions can be split across lines.
pub fn parse(source: &str, file: &str) -> Result<AstDocument, ParseError> {
    let tokens = tokenize(source, file).map_err(|e| ParseError {
        pos: e.pos,
        found: "invalid input".into(),
        expected: vec![],
        message: e.message,
    })?;
    Parser { tokens, idx: 0, file: file.to_string() }.document()
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    file: String,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        if self.idx < self.tokens.len() - 1 {
            self.idx += 1;
        }
        tok
    }

    fn err(&self, pos: SourcePos, expected: &[&str], message: impl Into<String>) -> ParseError {
        ParseError {
            found: self.peek().kind.describe(),
            pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            message: message.into(),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.err(
                self.peek().pos.clone(),
                &[&kind.describe()],
                format!("expected {what}"),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, SourcePos), ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                let tok = self.bump();
                Ok((name, tok.pos))
            }
            _ => Err(self.err(self.peek().pos.clone(), &["identifier"], format!("expected {what}"))),
        }
    }

    /// Accepts a plain or dotted identifier.
    fn dotted(&mut self, what: &str) -> Result<(String, SourcePos), ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(name) | TokenKind::Path(name) => {
                let name = name.clone();
                let tok = self.bump();
                Ok((name, tok.pos))
            }
            _ => Err(self.err(
                self.peek().pos.clone(),
                &["identifier", "dotted path"],
                format!("expected {what}"),
            )),
        }
    }

    fn eat_separator(&mut self) {
        if matches!(self.peek().kind, TokenKind::Comma | TokenKind::Semicolon) {
            self.bump();
        }
    }

    fn document(mut self) -> Result<AstDocument, ParseError> {
        self.expect(TokenKind::Namespace, "namespace declaration")?;
        let (namespace, _) = self.dotted("namespace name")?;

        let mut includes = Vec::new();
        while self.peek().kind == TokenKind::Include {
            self.bump();
            match &self.peek().kind {
                TokenKind::Str(path) => {
                    includes.push(path.clone());
                    self.bump();
                }
                _ => {
                    return Err(self.err(
                        self.peek().pos.clone(),
                        &["string literal"],
                        "expected include path",
                    ))
                }
            }
        }

        let mut definitions: Vec<AstDefinition> = Vec::new();
        let mut names = HashSet::new();
        while self.peek().kind != TokenKind::Eof {
            let def = self.definition()?;
            if !names.insert(def.name().to_string()) {
                return Err(self.err(
                    def.pos().clone(),
                    &[],
                    format!("duplicate definition name '{}'", def.name()),
                ));
            }
            definitions.push(def);
        }

        Ok(AstDocument { file: self.file.clone(), namespace, includes, definitions })
    }

    fn definition(&mut self) -> Result<AstDefinition, ParseError> {
        let annotations = self.annotations()?;
        match self.peek().kind {
            TokenKind::Typedef => self.typedef(annotations).map(AstDefinition::Typedef),
            TokenKind::Enum => self.enum_def(annotations).map(AstDefinition::Enum),
            TokenKind::Struct => self.struct_def(annotations).map(AstDefinition::Struct),
            _ => Err(self.err(
                self.peek().pos.clone(),
                &["'typedef'", "'enum'", "'struct'"],
                "expected a definition",
            )),
        }
    }

    fn typedef(&mut self, annotations: Vec<AstAnnotation>) -> Result<AstTypedef, ParseError> {
        let kw = self.expect(TokenKind::Typedef, "typedef")?;
        let base = self.type_expr()?;
        let (name, _) = self.ident("typedef name")?;
        Ok(AstTypedef { name, base, annotations, pos: kw.pos })
    }

    fn enum_def(&mut self, annotations: Vec<AstAnnotation>) -> Result<AstEnum, ParseError> {
        let kw = self.expect(TokenKind::Enum, "enum")?;
        let (name, _) = self.ident("enum name")?;
        self.expect(TokenKind::LBrace, "enum body")?;
        let mut entries: Vec<AstEnumEntry> = Vec::new();
        while self.peek().kind != TokenKind::RBrace {
            let (entry_name, entry_pos) = self.ident("enum entry name")?;
            self.expect(TokenKind::Equals, "enum entry value")?;
            let value = match self.peek().kind {
                TokenKind::Int(n) if i32::try_from(n).is_ok() => {
                    self.bump();
                    n as i32
                }
                _ => {
                    return Err(self.err(
                        self.peek().pos.clone(),
                        &["integer"],
                        "expected enum entry value",
                    ))
                }
            };
            if entries.iter().any(|e| e.name == entry_name) {
                return Err(self.err(
                    entry_pos,
                    &[],
                    format!("duplicate enum entry name '{entry_name}'"),
                ));
            }
            if entries.iter().any(|e| e.value == value) {
                return Err(self.err(
                    entry_pos,
                    &[],
                    format!("duplicate enum entry value {value}"),
                ));
            }
            entries.push(AstEnumEntry { name: entry_name, value });
            self.eat_separator();
        }
        self.expect(TokenKind::RBrace, "end of enum body")?;
        Ok(AstEnum { name, entries, annotations, pos: kw.pos })
    }

    fn struct_def(&mut self, annotations: Vec<AstAnnotation>) -> Result<AstComposite, ParseError> {
        let kw = self.expect(TokenKind::Struct, "struct")?;
        let (name, _) = self.ident("struct name")?;

        let mut embeds = Vec::new();
        if self.peek().kind == TokenKind::Embeds {
            self.bump();
            loop {
                let (embed, _) = self.dotted("embedded struct name")?;
                embeds.push(embed);
                if self.peek().kind == TokenKind::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }

        self.expect(TokenKind::LBrace, "struct body")?;
        let mut fields: Vec<AstField> = Vec::new();
        while self.peek().kind != TokenKind::RBrace {
            let field = self.field()?;
            if fields.iter().any(|f| f.id == field.id) {
                return Err(self.err(
                    field.pos.clone(),
                    &[],
                    format!("duplicate field id {} in struct '{name}'", field.id),
                ));
            }
            if fields.iter().any(|f| f.name == field.name) {
                return Err(self.err(
                    field.pos.clone(),
                    &[],
                    format!("duplicate field name '{}' in struct '{name}'", field.name),
                ));
            }
            fields.push(field);
            self.eat_separator();
        }
        self.expect(TokenKind::RBrace, "end of struct body")?;
        Ok(AstComposite { name, embeds, fields, annotations, pos: kw.pos })
    }

    fn field(&mut self) -> Result<AstField, ParseError> {
        let annotations = self.annotations()?;
        let pos = self.peek().pos.clone();
        let id = match self.peek().kind {
            TokenKind::Int(n) => {
                self.bump();
                n
            }
            _ => {
                return Err(self.err(
                    self.peek().pos.clone(),
                    &["field id"],
                    "expected field declaration",
                ))
            }
        };
        if !(1..=MAX_FIELD_ID).contains(&id) {
            return Err(self.err(pos, &[], format!("field id {id} outside 1..={MAX_FIELD_ID}")));
        }
        self.expect(TokenKind::Colon, "field id separator")?;
        let optional = if self.peek().kind == TokenKind::Optional {
            self.bump();
            true
        } else {
            false
        };
        let ty = self.type_expr()?;
        let (name, _) = self.ident("field name")?;
        Ok(AstField { id: id as i32, name, ty, optional, annotations, pos })
    }

    fn type_expr(&mut self) -> Result<TypeExpr, ParseError> {
        let (name, pos) = self.dotted("type")?;
        let ty = match name.as_str() {
            "bool" => TypeExpr::Bool,
            "i32" => TypeExpr::I32,
            "i64" => TypeExpr::I64,
            "double" => TypeExpr::Double,
            "string" => TypeExpr::Text,
            "binary" => TypeExpr::Binary,
            "list" => {
                self.expect(TokenKind::LAngle, "list element type")?;
                let elem = self.type_expr()?;
                self.expect(TokenKind::RAngle, "end of list type")?;
                TypeExpr::List(Box::new(elem))
            }
            "map" => {
                self.expect(TokenKind::LAngle, "map key type")?;
                let key = self.type_expr()?;
                self.expect(TokenKind::Comma, "map value type")?;
                let value = self.type_expr()?;
                self.expect(TokenKind::RAngle, "end of map type")?;
                TypeExpr::Map(Box::new(key), Box::new(value))
            }
            _ => TypeExpr::Named(name),
        };
        let _ = pos;
        Ok(ty)
    }

    fn annotations(&mut self) -> Result<Vec<AstAnnotation>, ParseError> {
        let mut out = Vec::new();
        while self.peek().kind == TokenKind::At {
            let at = self.bump();
            let (name, _) = self.dotted("annotation name")?;
            let mut args = Vec::new();
            if self.peek().kind == TokenKind::LBrace {
                self.bump();
                while self.peek().kind != TokenKind::RBrace {
                    let arg = self.annotation_arg()?;
                    if arg.key.is_none() && !args.is_empty() {
                        return Err(self.err(
                            self.peek().pos.clone(),
                            &[],
                            format!(
                                "positional argument must come first and be unique in @{name}"
                            ),
                        ));
                    }
                    args.push(arg);
                    if self.peek().kind == TokenKind::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(TokenKind::RBrace, "end of annotation arguments")?;
            }
            out.push(AstAnnotation { name, args, pos: at.pos });
        }
        Ok(out)
    }

    fn annotation_arg(&mut self) -> Result<AnnotationArg, ParseError> {
        // `key=value` when an identifier is followed by '='; otherwise a
        // positional literal.
        if let TokenKind::Ident(key) = &self.peek().kind {
            let key = key.clone();
            if self.tokens.get(self.idx + 1).map(|t| &t.kind) == Some(&TokenKind::Equals) {
                self.bump();
                self.bump();
                let value = self.literal()?;
                return Ok(AnnotationArg { key: Some(key), value });
            }
        }
        let value = self.literal()?;
        Ok(AnnotationArg { key: None, value })
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        match &self.peek().kind {
            TokenKind::Str(first) => {
                // Adjacent string literals concatenate.
                let mut text = first.clone();
                self.bump();
                while let TokenKind::Str(next) = &self.peek().kind {
                    text.push_str(next);
                    self.bump();
                }
                Ok(Literal::Str(text))
            }
            TokenKind::Int(n) => {
                let n = *n;
                self.bump();
                Ok(Literal::Int(n))
            }
            TokenKind::Ident(p) | TokenKind::Path(p) => {
                let p = p.clone();
                self.bump();
                Ok(Literal::Path(p))
            }
            _ => Err(self.err(
                self.peek().pos.clone(),
                &["string", "integer", "identifier"],
                "expected annotation argument",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LISTING2: &str = "\
namespace observability

typedef string ServiceID
typedef i32   StatusCode
typedef string ShardID // added line

struct RequestCounter {
  1: ServiceID service_id
  2: string    endpoint
  3: StatusCode status_code
  4: ShardID   shard_id // added line
}
";

    const LISTING6: &str = r#"
namespace mesh

typedef string ServiceID

enum OneWayMsgExchangeActorEnum {
  SOURCE = 1, TARGET = 2,
}
@SemanticQualifier
struct OneWayMsgExchangeActor {
  1: OneWayMsgExchangeActorEnum value
}
struct RPC {
  @OneWayMsgExchangeActor{SOURCE}
  @DisplayName{"Source service"}
  1: ServiceID source_service

  @OneWayMsgExchangeActor{TARGET}
  @DisplayName{"Target service"}
  2: ServiceID target_service
}
"#;

    #[test]
    fn request_counter_document() {
        let doc = parse(LISTING2, "listing2.tsch").unwrap();
        assert_eq!(doc.namespace, "observability");
        let names: Vec<_> = doc.definitions.iter().map(|d| d.name().to_string()).collect();
        assert_eq!(names, ["ServiceID", "StatusCode", "ShardID", "RequestCounter"]);
        let AstDefinition::Struct(counter) = &doc.definitions[3] else {
            panic!("expected struct");
        };
        assert_eq!(counter.fields.iter().map(|f| f.id).collect::<Vec<_>>(), [1, 2, 3, 4]);
        assert!(counter.fields.iter().all(|f| !f.optional));
    }

    #[test]
    fn qualifier_annotations_bind_to_fields() {
        let doc = parse(LISTING6, "listing6.tsch").unwrap();
        let AstDefinition::Enum(actor_enum) = &doc.definitions[1] else { panic!() };
        assert_eq!(actor_enum.entries[0], AstEnumEntry { name: "SOURCE".into(), value: 1 });
        assert_eq!(actor_enum.entries[1], AstEnumEntry { name: "TARGET".into(), value: 2 });

        let AstDefinition::Struct(qualifier) = &doc.definitions[2] else { panic!() };
        assert_eq!(qualifier.annotations[0].name, "SemanticQualifier");
        assert!(qualifier.annotations[0].args.is_empty());

        let AstDefinition::Struct(rpc) = &doc.definitions[3] else { panic!() };
        for (field, expected) in rpc.fields.iter().zip(["SOURCE", "TARGET"]) {
            let anno = &field.annotations[0];
            assert_eq!(anno.name, "OneWayMsgExchangeActor");
            assert_eq!(anno.positional().unwrap().as_path(), Some(expected));
        }
    }

    #[test]
    fn duplicate_field_id_rejected() {
        let err = parse("namespace x\nstruct S { 1: string a 1: string b }", "f.tsch").unwrap_err();
        assert!(err.message.contains("duplicate field id 1"), "{err}");
        assert_eq!(err.pos.line, 2);
    }

    #[test]
    fn duplicate_field_name_rejected() {
        let err = parse("namespace x\nstruct S { 1: string a 2: i32 a }", "f.tsch").unwrap_err();
        assert!(err.message.contains("duplicate field name"), "{err}");
    }

    #[test]
    fn duplicate_definition_rejected() {
        let src = "namespace x\ntypedef string A\ntypedef i32 A";
        assert!(parse(src, "f.tsch").unwrap_err().message.contains("duplicate definition"));
    }

    #[test]
    fn field_id_bounds() {
        assert!(parse("namespace x\nstruct S { 0: string a }", "f.tsch").is_err());
        assert!(parse("namespace x\nstruct S { 32768: string a }", "f.tsch").is_err());
        assert!(parse("namespace x\nstruct S { 32767: string a }", "f.tsch").is_ok());
    }

    #[test]
    fn second_positional_argument_rejected() {
        let src = "namespace x\n@A{\"one\", \"two\"}\ntypedef string T";
        // Adjacent strings only concatenate without a comma between them.
        assert!(parse(src, "f.tsch").unwrap_err().message.contains("positional"));
    }

    #[test]
    fn adjacent_strings_concatenate() {
        let src = "namespace x\n@Description{\"part one \"\n  \"part two\"}\ntypedef string T";
        let doc = parse(src, "f.tsch").unwrap();
        let AstDefinition::Typedef(td) = &doc.definitions[0] else { panic!() };
        assert_eq!(td.annotations[0].positional().unwrap().as_str(), Some("part one part two"));
    }

    #[test]
    fn embeds_clause() {
        let src = "namespace x\nstruct Base { 1: string a }\nstruct S embeds Base { 2: i32 b }";
        let doc = parse(src, "f.tsch").unwrap();
        let AstDefinition::Struct(s) = &doc.definitions[1] else { panic!() };
        assert_eq!(s.embeds, ["Base"]);
    }

    #[test]
    fn container_types() {
        let src = "namespace x\nstruct S { 1: list<string> xs 2: map<string, i64> m }";
        let doc = parse(src, "f.tsch").unwrap();
        let AstDefinition::Struct(s) = &doc.definitions[0] else { panic!() };
        assert_eq!(s.fields[0].ty, TypeExpr::List(Box::new(TypeExpr::Text)));
        assert_eq!(
            s.fields[1].ty,
            TypeExpr::Map(Box::new(TypeExpr::Text), Box::new(TypeExpr::I64))
        );
    }

    #[test]
    fn error_carries_expected_set() {
        let err = parse("namespace x\nstruct { }", "f.tsch").unwrap_err();
        assert!(!err.expected.is_empty());
        assert_eq!(err.pos.line, 2);
    }
}
