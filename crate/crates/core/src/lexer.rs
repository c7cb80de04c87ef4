//! Tokenizer for tym source text.
//!
//! Statements are newline terminated. A trailing `;` is accepted as an
//! alternative terminator and `%` starts a comment that runs to the end of
//! the line. Directive lines (`$ 'name'`) become a single [`TokenKind::Directive`].

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    IntLit(i64),
    RealLit(f64),
    StringLit(String),
    Directive(String),

    Function,
    End,
    If,
    Else,
    For,

    Int,
    Real,
    Float,
    IntArray,
    RealArray,

    Plus,
    Minus,
    Star,
    Slash,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    OrOr,
    AndAnd,
    Colon,
    Comma,
    LParen,
    RParen,

    Newline,
    EndOfFile,
}

impl TokenKind {
    fn keyword(word: &str) -> Option<TokenKind> {
        Some(match word {
            "function" => TokenKind::Function,
            "end" => TokenKind::End,
            "if" => TokenKind::If,
            "else" => TokenKind::Else,
            "for" => TokenKind::For,
            "int" => TokenKind::Int,
            "real" => TokenKind::Real,
            "float" => TokenKind::Float,
            "intArray" => TokenKind::IntArray,
            "realArray" => TokenKind::RealArray,
            _ => return None,
        })
    }

    /// Short human readable name, used in "expected ..." messages.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("identifier `{name}`"),
            TokenKind::IntLit(v) => format!("integer `{v}`"),
            TokenKind::RealLit(v) => format!("real `{v}`"),
            TokenKind::StringLit(_) => "string literal".to_string(),
            TokenKind::Directive(name) => format!("directive '{name}'"),
            TokenKind::Newline => "end of line".to_string(),
            TokenKind::EndOfFile => "end of file".to_string(),
            other => format!("`{}`", other.spelling()),
        }
    }

    /// Fixed source spelling for keywords and punctuation.
    pub fn spelling(&self) -> &'static str {
        match self {
            TokenKind::Function => "function",
            TokenKind::End => "end",
            TokenKind::If => "if",
            TokenKind::Else => "else",
            TokenKind::For => "for",
            TokenKind::Int => "int",
            TokenKind::Real => "real",
            TokenKind::Float => "float",
            TokenKind::IntArray => "intArray",
            TokenKind::RealArray => "realArray",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Assign => "=",
            TokenKind::EqEq => "==",
            TokenKind::NotEq => "~=",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::OrOr => "||",
            TokenKind::AndAnd => "&&",
            TokenKind::Colon => ":",
            TokenKind::Comma => ",",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::Newline => "newline",
            TokenKind::EndOfFile => "end of file",
            TokenKind::Ident(_)
            | TokenKind::IntLit(_)
            | TokenKind::RealLit(_)
            | TokenKind::StringLit(_)
            | TokenKind::Directive(_) => "<literal>",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// The exact source substring of the lexeme.
    pub text: String,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{line}:{col}: unterminated string literal")]
    UnterminatedString { line: u32, col: u32 },
    #[error("{line}:{col}: illegal character {ch:?}")]
    IllegalCharacter { ch: char, line: u32, col: u32 },
    #[error("{line}:{col}: malformed directive: {reason}")]
    MalformedDirective { reason: String, line: u32, col: u32 },
    #[error("{line}:{col}: integer literal `{text}` out of range")]
    LiteralOutOfRange { text: String, line: u32, col: u32 },
}

impl LexError {
    pub fn position(&self) -> (u32, u32) {
        match self {
            LexError::UnterminatedString { line, col }
            | LexError::IllegalCharacter { line, col, .. }
            | LexError::MalformedDirective { line, col, .. }
            | LexError::LiteralOutOfRange { line, col, .. } => (*line, *col),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            LexError::UnterminatedString { .. } => "UnterminatedString",
            LexError::IllegalCharacter { .. } => "IllegalCharacter",
            LexError::MalformedDirective { .. } => "MalformedDirective",
            LexError::LiteralOutOfRange { .. } => "LiteralOutOfRange",
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{} {}", self.line, self.col, self.kind.describe())
    }
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: u32,
    col: u32,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |&(o, _)| o)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn last_is_terminator(&self) -> bool {
        matches!(self.tokens.last(), None | Some(Token { kind: TokenKind::Newline, .. }))
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: u32, col: u32) {
        let text = self.src[start..self.offset()].to_string();
        self.tokens.push(Token { kind, text, line, col });
    }

    fn push_newline(&mut self, start: usize, line: u32, col: u32) {
        if !self.last_is_terminator() {
            self.push(TokenKind::Newline, start, line, col);
        }
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut at_line_start = true;
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            let start = self.offset();
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                    continue;
                }
                '\n' => {
                    self.bump();
                    self.push_newline(start, line, col);
                    at_line_start = true;
                    continue;
                }
                ';' => {
                    self.bump();
                    self.push_newline(start, line, col);
                    continue;
                }
                '%' => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                    continue;
                }
                '$' => {
                    if !at_line_start {
                        return Err(LexError::MalformedDirective {
                            reason: "`$` must be the first character of a line".into(),
                            line,
                            col,
                        });
                    }
                    self.bump();
                    while matches!(self.peek(), Some(' ' | '\t')) {
                        self.bump();
                    }
                    if self.peek() != Some('\'') {
                        return Err(LexError::MalformedDirective {
                            reason: "expected a quoted directive name after `$`".into(),
                            line,
                            col,
                        });
                    }
                    let name = self.string_body(line, col)?;
                    if name.is_empty() {
                        return Err(LexError::MalformedDirective {
                            reason: "empty directive name".into(),
                            line,
                            col,
                        });
                    }
                    self.push(TokenKind::Directive(name), start, line, col);
                }
                '\'' => {
                    let body = self.string_body(line, col)?;
                    self.push(TokenKind::StringLit(body), start, line, col);
                }
                c if c.is_ascii_digit() => self.number(start, line, col)?,
                c if c.is_ascii_alphabetic() || c == '_' => {
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                        self.bump();
                    }
                    let word = &self.src[start..self.offset()];
                    let kind = TokenKind::keyword(word)
                        .unwrap_or_else(|| TokenKind::Ident(word.to_string()));
                    self.push(kind, start, line, col);
                }
                _ => {
                    let kind = self.operator(c, line, col)?;
                    self.push(kind, start, line, col);
                }
            }
            at_line_start = false;
        }
        let end = self.src.len();
        let (line, col) = (self.line, self.col);
        self.push_newline(end, line, col);
        self.tokens.push(Token { kind: TokenKind::EndOfFile, text: String::new(), line, col });
        Ok(self.tokens)
    }

    /// Consumes a single-quoted string starting at the opening quote. A doubled
    /// quote inside the string stands for one literal quote.
    fn string_body(&mut self, line: u32, col: u32) -> Result<String, LexError> {
        self.bump();
        let mut body = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(LexError::UnterminatedString { line, col }),
                Some('\'') => {
                    if self.peek() == Some('\'') {
                        self.bump();
                        body.push('\'');
                    } else {
                        return Ok(body);
                    }
                }
                Some(c) => body.push(c),
            }
        }
    }

    fn number(&mut self, start: usize, line: u32, col: u32) -> Result<(), LexError> {
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let is_real = self.peek() == Some('.') && matches!(self.peek_at(1), Some(c) if c.is_ascii_digit());
        if !is_real {
            let text = &self.src[start..self.offset()];
            let value = text.parse::<i64>().map_err(|_| LexError::LiteralOutOfRange {
                text: text.to_string(),
                line,
                col,
            })?;
            self.push(TokenKind::IntLit(value), start, line, col);
            return Ok(());
        }
        self.bump();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = usize::from(matches!(self.peek_at(1), Some('+' | '-')));
            if matches!(self.peek_at(1 + sign), Some(c) if c.is_ascii_digit()) {
                for _ in 0..=sign {
                    self.bump();
                }
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            }
        }
        let text = &self.src[start..self.offset()];
        // The accepted shape is always a valid float literal.
        let value: f64 = text.parse().expect("real literal");
        self.push(TokenKind::RealLit(value), start, line, col);
        Ok(())
    }

    fn operator(&mut self, c: char, line: u32, col: u32) -> Result<TokenKind, LexError> {
        let next = self.peek_at(1);
        let (kind, len) = match (c, next) {
            ('=', Some('=')) => (TokenKind::EqEq, 2),
            ('~', Some('=')) => (TokenKind::NotEq, 2),
            ('<', Some('=')) => (TokenKind::Le, 2),
            ('>', Some('=')) => (TokenKind::Ge, 2),
            ('|', Some('|')) => (TokenKind::OrOr, 2),
            ('&', Some('&')) => (TokenKind::AndAnd, 2),
            ('=', _) => (TokenKind::Assign, 1),
            ('<', _) => (TokenKind::Lt, 1),
            ('>', _) => (TokenKind::Gt, 1),
            ('+', _) => (TokenKind::Plus, 1),
            ('-', _) => (TokenKind::Minus, 1),
            ('*', _) => (TokenKind::Star, 1),
            ('/', _) => (TokenKind::Slash, 1),
            (':', _) => (TokenKind::Colon, 1),
            (',', _) => (TokenKind::Comma, 1),
            ('(', _) => (TokenKind::LParen, 1),
            (')', _) => (TokenKind::RParen, 1),
            _ => return Err(LexError::IllegalCharacter { ch: c, line, col }),
        };
        for _ in 0..len {
            self.bump();
        }
        Ok(kind)
    }
}

/// Splits `source` into tokens. The result always ends with exactly one
/// [`TokenKind::EndOfFile`], preceded by a [`TokenKind::Newline`] whenever the
/// input contains any token at all.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    Lexer {
        src: source,
        chars: source.char_indices().collect(),
        pos: 0,
        line: 1,
        col: 1,
        tokens: Vec::new(),
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn directive_line() {
        assert_eq!(
            kinds("$ 'no_check_ranges'"),
            vec![
                TokenKind::Directive("no_check_ranges".into()),
                TokenKind::Newline,
                TokenKind::EndOfFile
            ]
        );
    }

    #[test]
    fn indexed_store() {
        use TokenKind::*;
        assert_eq!(
            kinds("z(i, j) = 0"),
            vec![
                Ident("z".into()),
                LParen,
                Ident("i".into()),
                Comma,
                Ident("j".into()),
                RParen,
                Assign,
                IntLit(0),
                Newline,
                EndOfFile
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert_eq!(kinds(""), vec![TokenKind::EndOfFile]);
        assert_eq!(kinds("\n\n  % only a comment\n"), vec![TokenKind::EndOfFile]);
    }

    #[test]
    fn unterminated_string() {
        assert_eq!(
            tokenize("error('oops"),
            Err(LexError::UnterminatedString { line: 1, col: 7 })
        );
    }

    #[test]
    fn illegal_character() {
        assert!(matches!(
            tokenize("a = b @ c"),
            Err(LexError::IllegalCharacter { ch: '@', line: 1, col: 7 })
        ));
    }

    #[test]
    fn malformed_directives() {
        assert!(matches!(tokenize("$ no_quotes"), Err(LexError::MalformedDirective { .. })));
        assert!(matches!(tokenize("a = 1 $ 'x'"), Err(LexError::MalformedDirective { .. })));
    }

    #[test]
    fn blank_lines_and_semicolons_collapse() {
        use TokenKind::*;
        assert_eq!(
            kinds("a = 1;\n\n\nb = 2; % trailing\n"),
            vec![
                Ident("a".into()),
                Assign,
                IntLit(1),
                Newline,
                Ident("b".into()),
                Assign,
                IntLit(2),
                Newline,
                EndOfFile
            ]
        );
        assert_eq!(kinds("a = 1; b = 2").iter().filter(|k| **k == Newline).count(), 2);
    }

    #[test]
    fn numbers_and_operators() {
        use TokenKind::*;
        assert_eq!(
            kinds("x = 1.5e-3 ~= 2 <= 3 || 4 && 5"),
            vec![
                Ident("x".into()),
                Assign,
                RealLit(1.5e-3),
                NotEq,
                IntLit(2),
                Le,
                IntLit(3),
                OrOr,
                IntLit(4),
                AndAnd,
                IntLit(5),
                Newline,
                EndOfFile
            ]
        );
        assert!(matches!(
            tokenize("99999999999999999999"),
            Err(LexError::LiteralOutOfRange { .. })
        ));
    }

    #[test]
    fn string_with_doubled_quote() {
        assert_eq!(kinds("'it''s'")[0], TokenKind::StringLit("it's".into()));
    }

    #[test]
    fn positions_point_at_lexeme_start() {
        let src = "function int z = f()\n  int a = rows(x)\nend\n";
        let lines: Vec<&str> = src.lines().collect();
        for tok in tokenize(src).unwrap() {
            if matches!(tok.kind, TokenKind::Newline | TokenKind::EndOfFile) {
                continue;
            }
            let line = lines[tok.line as usize - 1];
            assert!(line[tok.col as usize - 1..].starts_with(&tok.text), "{tok:?}");
        }
    }
}
