use super::token::{LexError, SourcePos, Token, TokenKind};

/// Splits IDL source text into tokens.
///
/// Comments (`//` to end of line, `/* ... */`) are discarded. String
/// literals accept both `"` and `'` quoting and may span multiple lines.
/// The final token is always [`TokenKind::Eof`].
pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer::new(source, file);
    let mut tokens = Vec::new();
    loop {
        let tok = lx.next_token()?;
        let done = tok.kind == TokenKind::Eof;
        tokens.push(tok);
        if done {
            return Ok(tokens);
        }
    }
}

struct Lexer<'a> {
    file: &'a str,
    chars: Vec<char>,
    idx: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(source: &'a str, file: &'a str) -> Self {
        Self { file, chars: source.chars().collect(), idx: 0, line: 1, column: 1 }
    }

    fn pos(&self) -> SourcePos {
        SourcePos::new(self.file, self.line, self.column)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.idx + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.peek()?;
        self.idx += 1;
        if ch == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(ch)
    }

    fn error(&self, pos: SourcePos, message: impl Into<String>) -> LexError {
        LexError { pos, message: message.into() }
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            Some('*') if self.peek_at(1) == Some('/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(_) => {
                                self.bump();
                            }
                            None => return Err(self.error(start, "unterminated block comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, LexError> {
        self.skip_trivia()?;
        let pos = self.pos();
        let Some(ch) = self.peek() else {
            return Ok(Token { kind: TokenKind::Eof, pos });
        };

        let kind = match ch {
            '@' => self.punct(TokenKind::At),
            '{' => self.punct(TokenKind::LBrace),
            '}' => self.punct(TokenKind::RBrace),
            '<' => self.punct(TokenKind::LAngle),
            '>' => self.punct(TokenKind::RAngle),
            ',' => self.punct(TokenKind::Comma),
            ':' => self.punct(TokenKind::Colon),
            ';' => self.punct(TokenKind::Semicolon),
            '=' => self.punct(TokenKind::Equals),
            '"' | '\'' => self.string(pos.clone())?,
            '-' => {
                if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
                    self.integer(pos.clone())?
                } else {
                    return Err(self.error(pos, "illegal character '-'"));
                }
            }
            c if c.is_ascii_digit() => self.integer(pos.clone())?,
            c if is_ident_start(c) => self.word(),
            c => return Err(self.error(pos, format!("illegal character {c:?}"))),
        };
        Ok(Token { kind, pos })
    }

    fn punct(&mut self, kind: TokenKind) -> TokenKind {
        self.bump();
        kind
    }

    fn string(&mut self, start: SourcePos) -> Result<TokenKind, LexError> {
        let quote = self.bump().expect("caller checked quote");
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(start, "unterminated string literal")),
                Some(c) if c == quote => return Ok(TokenKind::Str(value)),
                Some('\\') => {
                    let esc_pos = self.pos();
                    match self.bump() {
                        Some('n') => value.push('\n'),
                        Some('t') => value.push('\t'),
                        Some('r') => value.push('\r'),
                        Some('\\') => value.push('\\'),
                        Some('"') => value.push('"'),
                        Some('\'') => value.push('\''),
                        Some('0') => value.push('\0'),
                        Some(c) => {
                            return Err(self.error(esc_pos, format!("unknown escape '\\{c}'")))
                        }
                        None => return Err(self.error(start, "unterminated string literal")),
                    }
                }
                Some(c) => value.push(c),
            }
        }
    }

    fn integer(&mut self, start: SourcePos) -> Result<TokenKind, LexError> {
        let mut text = String::new();
        if self.peek() == Some('-') {
            text.push('-');
            self.bump();
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        text.parse::<i64>()
            .map(TokenKind::Int)
            .map_err(|_| self.error(start, format!("integer literal out of range: {text}")))
    }

    /// Lexes a keyword, identifier, or dotted path. A dot joins segments only
    /// when immediately followed by an identifier start, so `InfraEnum.Host`
    /// is one token while a stray trailing dot is an error at parse time.
    fn word(&mut self) -> TokenKind {
        let mut text = String::new();
        let mut dotted = false;
        loop {
            while let Some(c) = self.peek() {
                if is_ident_continue(c) {
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            if self.peek() == Some('.') && self.peek_at(1).is_some_and(is_ident_start) {
                text.push('.');
                self.bump();
                dotted = true;
            } else {
                break;
            }
        }
        if dotted {
            return TokenKind::Path(text);
        }
        match text.as_str() {
            "namespace" => TokenKind::Namespace,
            "include" => TokenKind::Include,
            "typedef" => TokenKind::Typedef,
            "enum" => TokenKind::Enum,
            "struct" => TokenKind::Struct,
            "embeds" => TokenKind::Embeds,
            "optional" => TokenKind::Optional,
            _ => TokenKind::Ident(text),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}
